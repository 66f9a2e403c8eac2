#include "clauselab/hashing.hpp"

#include <unordered_map>

namespace clauselab {

CollisionReport collisionReport(std::span<const std::string> keys, const HashConfig& cfg) {
  std::unordered_map<std::uint32_t, std::uint64_t> load;
  for (const std::string& k : keys) ++load[cfg.bucket(k)];
  CollisionReport r;
  r.occupiedBuckets = load.size();
  r.emptyBuckets = cfg.base - r.occupiedBuckets;
  for (const auto& [bucket, count] : load) {
    if (count > 1) r.collidingFeatures += count;
  }
  return r;
}

}  // namespace clauselab
