#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clauselab/clause.hpp"

namespace clauselab {

/// Weighting state for one proof attempt. Smaller weights are selected first.
class ClauseWeigher {
 public:
  virtual ~ClauseWeigher() = default;
  virtual double weight(const Clause& c) = 0;
};

/// A trained clause evaluator. Models are immutable; `bind` creates the
/// per-search state (caches, precomputed conjecture context).
class ClauseModel {
 public:
  virtual ~ClauseModel() = default;
  virtual std::string kind() const = 0;
  virtual std::unique_ptr<ClauseWeigher> bind(const TermBank& bank,
                                              std::span<const Clause> conjecture) const = 0;
};

inline constexpr double kPositiveWeight = 1.0;
inline constexpr double kNegativeWeight = 10.0;

/// A built-in heuristic or a trained model.
class WeightFunction {
 public:
  enum class Builtin { SymbolCount, Fifo };

  static WeightFunction symbolCount() { return WeightFunction(Builtin::SymbolCount); }
  static WeightFunction fifo() { return WeightFunction(Builtin::Fifo); }
  static WeightFunction model(std::shared_ptr<const ClauseModel> m);

  bool isModel() const { return model_ != nullptr; }
  const std::shared_ptr<const ClauseModel>& modelHandle() const { return model_; }
  std::string name() const;

  std::unique_ptr<ClauseWeigher> bind(const TermBank& bank, std::span<const Clause> conjecture) const;

 private:
  explicit WeightFunction(Builtin b) : builtin_(b) {}

  Builtin builtin_ = Builtin::SymbolCount;
  std::shared_ptr<const ClauseModel> model_;
};

struct QueueSpec {
  std::uint32_t frequency = 1;
  WeightFunction weight = WeightFunction::fifo();
};

struct Strategy {
  std::vector<QueueSpec> queues;

  void validate() const;
  /// "4*symbols,1*fifo" style rendering; models render as "model:<kind>".
  std::string toString() const;
};

/// Parses "4*symbols,1*fifo". Models are referenced as `model`, resolved
/// through `model` when given.
Strategy parseStrategy(std::string_view spec, std::shared_ptr<const ClauseModel> model = nullptr);

/// The default baseline: (4 * symbol count, 1 * FIFO).
Strategy baselineStrategy();

enum class CombineMode { Solo, Coop };

/// Solo: (1*M). Coop: ((sum f_i)*M, f_1*W_1, ..., f_k*W_k).
Strategy combineStrategies(const Strategy& s, std::shared_ptr<const ClauseModel> model, CombineMode mode);

/// Round-robin queue choice: queue i yields f_i consecutive selections per
/// cycle in list order; exhausted queues are skipped.
class QueueScheduler {
 public:
  explicit QueueScheduler(std::vector<std::uint32_t> frequencies);

  std::optional<std::size_t> next(const std::function<bool(std::size_t)>& nonEmpty);

 private:
  std::vector<std::uint32_t> frequencies_;
  std::size_t current_ = 0;
  std::uint32_t used_ = 0;
};

}  // namespace clauselab
