#pragma once

#include <memory>
#include <string>
#include <vector>

#include "clauselab/clause.hpp"

namespace clauselab {

/// A selected given clause labelled by proof membership, together with the
/// conjecture of the search it came from. The bank is shared by all examples
/// of one problem.
struct TrainingExample {
  std::shared_ptr<const TermBank> bank;
  Clause clause;
  std::vector<Clause> conjecture;
  bool positive = false;
  std::string problemName;
};

}  // namespace clauselab
