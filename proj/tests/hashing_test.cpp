#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "clauselab/hashing.hpp"

namespace clauselab {
namespace {

// Reference evaluation of the recurrence through its multiplicative form
// (h<<6) + (h<<16) - h == h * 65599, reduced explicitly modulo 2^64 in
// 128-bit arithmetic.
std::uint64_t referenceSdbm(const std::string& s) {
  unsigned __int128 h = 0;
  const unsigned __int128 mod = static_cast<unsigned __int128>(1) << 64;
  for (unsigned char c : s) h = (h * 65599u + c) % mod;
  return static_cast<std::uint64_t>(h);
}

TEST(Sdbm, HandValues) {
  EXPECT_EQ(sdbm(""), 0u);
  EXPECT_EQ(sdbm("a"), 97u);
  EXPECT_EQ(sdbm("ab"), 6363201u);
  static_assert(sdbm("a") == 97);
}

TEST(Sdbm, MatchesReferenceOnRandomStrings) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(0, 64);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 10000; ++i) {
    std::string s(static_cast<std::size_t>(len(rng)), '\0');
    for (char& c : s) c = static_cast<char>(byte(rng));
    ASSERT_EQ(sdbm(s), referenceSdbm(s)) << "string #" << i;
  }
}

TEST(HashConfig, RejectsTinyBase) {
  EXPECT_THROW(HashConfig(1), std::invalid_argument);
  EXPECT_THROW(HashConfig(0), std::invalid_argument);
  EXPECT_NO_THROW(HashConfig(2));
}

TEST(HashConfig, BucketInRange) {
  const HashConfig cfg(1000);
  for (const char* k : {"v|P|f|a", "h|f|a|b", "len", "sc|*"}) {
    EXPECT_LT(hashKey(k, cfg), 1000u);
    EXPECT_EQ(hashKey(k, cfg), sdbm(k) % 1000);
  }
}

TEST(CollisionReport, SingleFeature) {
  const std::vector<std::string> keys{"len"};
  EXPECT_EQ(collisionReport(keys, HashConfig(1024)), (CollisionReport{1, 0, 1023}));
}

TEST(CollisionReport, AllKeysInOneBucket) {
  // Base 2: pick keys whose hashes share parity.
  std::vector<std::string> keys;
  for (int i = 0; keys.size() < 5; ++i) {
    std::string k = "k" + std::to_string(i);
    if (sdbm(k) % 2 == 0) keys.push_back(k);
  }
  const auto r = collisionReport(keys, HashConfig(2));
  EXPECT_EQ(r.collidingFeatures, 5u);
  EXPECT_EQ(r.occupiedBuckets, 1u);
  EXPECT_EQ(r.emptyBuckets, 1u);
}

TEST(CollisionReport, NonIncreasingOverPowersOfTwo) {
  std::vector<std::string> keys;
  for (int i = 0; i < 3000; ++i) keys.push_back("sc|sym" + std::to_string(i));
  std::uint64_t previous = keys.size() + 1;
  for (int e = 10; e <= 15; ++e) {
    const auto r = collisionReport(keys, HashConfig(std::uint64_t{1} << e));
    EXPECT_LE(r.collidingFeatures, previous) << "base 2^" << e;
    EXPECT_EQ(r.occupiedBuckets + r.emptyBuckets, std::uint64_t{1} << e);
    previous = r.collidingFeatures;
  }
}

}  // namespace
}  // namespace clauselab
