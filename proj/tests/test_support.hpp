#pragma once

#include <initializer_list>
#include <string>
#include <utility>

#include "clauselab/features.hpp"

namespace clauselab::testing {

// Indexed, frozen space with keys f0..f{n-1}.
inline FeatureSpace syntheticSpace(std::size_t n) {
  FeatureSpace s = FeatureSpace::indexed();
  for (std::size_t i = 0; i < n; ++i) s.add("f" + std::to_string(i));
  s.freeze();
  return s;
}

inline FeatureVector sparse(const FeatureSpace& space, std::initializer_list<std::pair<std::uint32_t, std::int64_t>> e) {
  FeatureVector v;
  v.dimension = space.vectorDimension();
  for (const auto& p : e) {
    if (p.second != 0) v.entries.push_back(p);
  }
  return v;
}

inline void push(LabeledVectors& d, FeatureVector v, bool label) {
  d.dimension = v.dimension;
  d.rows.push_back(std::move(v));
  d.labels.push_back(label);
}

}  // namespace clauselab::testing
