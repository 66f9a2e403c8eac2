#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clauselab {

/// sdbm string hash: h = c + (h << 6) + (h << 16) - h over unsigned bytes,
/// wrapping in 64 bits, starting from 0.
constexpr std::uint64_t sdbm(std::string_view s) {
  std::uint64_t h = 0;
  for (char ch : s) {
    const auto c = static_cast<std::uint64_t>(static_cast<unsigned char>(ch));
    h = c + (h << 6) + (h << 16) - h;
  }
  return h;
}

struct HashConfig {
  std::uint64_t base = 1024;

  explicit HashConfig(std::uint64_t b) : base(b) {
    if (b < 2) throw std::invalid_argument("hash base must be at least 2");
  }

  std::uint32_t bucket(std::string_view key) const {
    return static_cast<std::uint32_t>(sdbm(key) % base);
  }
};

inline std::uint32_t hashKey(std::string_view serializedKey, const HashConfig& cfg) {
  return cfg.bucket(serializedKey);
}

struct CollisionReport {
  std::uint64_t occupiedBuckets = 0;
  /// Features sharing their bucket with at least one other feature.
  std::uint64_t collidingFeatures = 0;
  std::uint64_t emptyBuckets = 0;

  bool operator==(const CollisionReport&) const = default;
};

/// Exact bucket accounting for a set of distinct serialized feature keys.
CollisionReport collisionReport(std::span<const std::string> keys, const HashConfig& cfg);

}  // namespace clauselab
