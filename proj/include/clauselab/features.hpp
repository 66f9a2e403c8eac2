#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clauselab/clause.hpp"
#include "clauselab/hashing.hpp"
#include "clauselab/training_example.hpp"

namespace clauselab {

enum class FeatureKind : std::uint8_t {
  Vertical,
  Horizontal,
  SymbolCount,
  SymbolMaxDepth,
  Length,
  PositiveCount,
  NegativeCount,
};

/// Max-type features merge by maximum; all others by sum.
constexpr bool isMaxType(FeatureKind k) { return k == FeatureKind::SymbolMaxDepth; }

struct FeatureKey {
  FeatureKind kind = FeatureKind::Length;
  std::vector<std::string> payload;
  bool conjectureSide = false;

  /// `kind|payload1|payload2|...`, with `c|` prepended on the conjecture
  /// side. `|` and `\` inside payloads are backslash-escaped.
  std::string serialize() const;
  static FeatureKey parse(std::string_view text);

  bool operator==(const FeatureKey&) const = default;
};

/// Token conventions shared with the neural layer.
namespace tokens {
inline constexpr std::string_view kVariable = "*";
inline constexpr std::string_view kBlank = "#";
std::string skolem(std::uint32_t arity);
}  // namespace tokens

struct FeatureEntry {
  FeatureKey key;
  std::string text;  // key.serialize()
  std::int64_t value = 0;
};

/// Clause features with exact integer values, sorted by serialized key.
/// Zero-valued features are omitted.
using FeatureMultiset = std::vector<FeatureEntry>;

FeatureMultiset extractClauseFeatures(const TermBank& bank, const Clause& c);

/// Per-clause features of a conjecture merged by the sum/max rule.
FeatureMultiset extractConjectureFeatures(const TermBank& bank, std::span<const Clause> conjecture);

/// Sparse integer vector; entries sorted by index, all nonzero.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, std::int64_t>> entries;
  std::uint32_t dimension = 0;

  std::int64_t at(std::uint32_t index) const;
};

/// Global feature numbering: either an explicit, freezable index or a hash
/// base. `halfDimension()` is the length of each of the clause and conjecture
/// halves; indexed spaces reserve their last slot for unseen keys.
class FeatureSpace {
 public:
  static FeatureSpace indexed();
  static FeatureSpace hashed(std::uint64_t base);

  bool isHashed() const { return hashBase_ != 0; }
  std::uint64_t hashBase() const { return hashBase_; }
  bool frozen() const { return frozen_; }
  void freeze() { frozen_ = true; }

  /// Registers a clause-side key (unsided text) in an unfrozen indexed space.
  std::uint32_t add(std::string_view key);

  std::size_t keyCount() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }
  std::optional<std::uint32_t> indexOf(std::string_view key) const;

  std::uint32_t halfDimension() const;
  std::uint32_t vectorDimension() const { return 2 * halfDimension(); }
  std::uint32_t overflowIndex() const;

  /// Clause-side slot for a key: its index, the overflow slot, or its bucket.
  std::uint32_t slot(std::string_view key) const;

  /// Human-readable description of a vector index for sidecar files.
  std::string describe(std::uint32_t index) const;

 private:
  std::uint64_t hashBase_ = 0;
  bool frozen_ = false;
  struct KeyHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t, KeyHash, std::equal_to<>> index_;
};

/// Clause half from `clause`, conjecture half (offset by halfDimension) from
/// `conjecture`. Colliding slots sum sum-type values and take the maximum of
/// max-type values, then add the two.
FeatureVector vectorize(const FeatureMultiset& clause, const FeatureMultiset& conjecture,
                        const FeatureSpace& space);

FeatureVector vectorize(const TermBank& bank, const Clause& c, std::span<const Clause> conjecture,
                        const FeatureSpace& space);

/// Indexed, frozen space over every key of the examples' clauses and
/// conjectures in first-seen order.
FeatureSpace buildSpace(std::span<const TrainingExample> examples);

std::uint32_t hashKey(const FeatureKey& key, const HashConfig& cfg);

CollisionReport collisionReport(const FeatureSpace& space, const HashConfig& cfg);

/// Vectors and labels for a set of examples; conjecture features are
/// computed once per distinct conjecture.
struct LabeledVectors {
  std::vector<FeatureVector> rows;
  std::vector<bool> labels;
  std::uint32_t dimension = 0;
};

LabeledVectors vectorizeExamples(std::span<const TrainingExample> examples, const FeatureSpace& space);

/// Text block: `space indexed <count>` followed by one key per line, or
/// `space hashed <base>`.
void writeSpace(std::ostream& out, const FeatureSpace& space);
FeatureSpace readSpace(std::istream& in);

/// Clause-to-vector conversion for one proof attempt: the conjecture half
/// is computed once.
class BoundVectorizer {
 public:
  BoundVectorizer(const FeatureSpace& space, const TermBank& bank, std::span<const Clause> conjecture);

  /// Same result as `vectorize(bank, c, conjecture, space)`.
  FeatureVector operator()(const Clause& c) const;

 private:
  const FeatureSpace& space_;
  const TermBank& bank_;
  std::vector<std::pair<std::uint32_t, std::int64_t>> conjectureHalf_;
};

}  // namespace clauselab
