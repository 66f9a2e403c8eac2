#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "clauselab/autodiff.hpp"
#include "clauselab/strategy.hpp"
#include "clauselab/training_example.hpp"

namespace clauselab {

enum class Nonlinearity : std::uint8_t { Relu6, Tanh };

struct NeuralConfig {
  std::uint32_t n = 64;  // symbol, term and clause embedding size
  std::uint32_t m = 16;  // conjecture summary size
  std::uint32_t rareThreshold = 10;
  Nonlinearity nonlinearity = Nonlinearity::Relu6;
  std::uint32_t batchSize = 128;
  double learningRate = 1e-3;
  std::uint32_t epochs = 50;
  /// Loss weight of positive examples; 0 selects #neg/#pos.
  double positiveClassWeight = 0;
  std::uint64_t seed = 1;
  /// Largest arity with a pre-allocated shared (rare and Skolem) block.
  std::uint32_t maxSharedArity = 8;
  /// Order clauses by 1 + 9 (1 - p) instead of the two-valued weight.
  bool probabilityOrdering = false;

  void validate() const;
};

/// Per-symbol parameters: a learned vector for arity 0, otherwise an affine
/// map from the concatenated argument embeddings followed by the
/// nonlinearity.
struct SymbolBlock {
  std::uint32_t arity = 0;
  std::size_t weight = 0;  // parameter index
  std::size_t bias = 0;    // parameter index, unused for arity 0
};

struct LstmParams {
  std::size_t gates = 0;       // (4h x (input + h))
  std::size_t gateBias = 0;    // (4h)
  std::size_t projection = 0;  // (out x h)
  std::size_t projectionBias = 0;
  std::uint32_t hidden = 0;
};

struct FinParams {
  std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, w3 = 0, b3 = 0;
};

class NeuralModel final : public ClauseModel {
 public:
  /// Block keys: `var`, `neg`, `sk/<arity>`, `rare/<f|p>/<arity>` and
  /// `<f|p>/<arity>/<name>` for symbols at or above the rare threshold.
  NeuralModel(NeuralConfig config, const std::vector<std::string>& symbolKeys);

  const NeuralConfig& config() const { return config_; }

  /// Block for a symbol, falling back to the shared rare block.
  std::uint32_t blockFor(const Symbol& s) const;
  std::uint32_t negationBlock() const { return negation_; }
  const SymbolBlock& block(std::uint32_t i) const { return blocks_[i]; }
  std::size_t blockCount() const { return blocks_.size(); }
  const std::unordered_map<std::string, std::uint32_t>& symbolKeys() const { return keys_; }

  const LstmParams& clauseCombiner() const { return clause_; }
  const LstmParams& conjectureCombiner() const { return conjecture_; }
  const FinParams& fin() const { return fin_; }

  std::vector<ad::Parameter>& parameters() { return params_; }
  const std::vector<ad::Parameter>& parameters() const { return params_; }
  std::size_t parameterCount() const;

  /// Epoch losses recorded by training (weighted mean NLL after each epoch).
  std::vector<double> lossHistory;

  std::string kind() const override { return "neural"; }
  std::unique_ptr<ClauseWeigher> bind(const TermBank& bank, std::span<const Clause> conjecture) const override;

  void save(std::ostream& out) const;
  static std::shared_ptr<NeuralModel> load(std::istream& in);

 private:
  NeuralModel() = default;
  std::size_t addParam(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  std::uint32_t addBlock(const std::string& key, std::uint32_t arity);
  LstmParams addLstm(const std::string& name, std::uint32_t input, std::uint32_t hidden, std::uint32_t out);
  void build(const std::vector<std::string>& symbolKeys);
  void initialize();

  NeuralConfig config_;
  std::vector<ad::Parameter> params_;
  std::vector<SymbolBlock> blocks_;
  std::unordered_map<std::string, std::uint32_t> keys_;
  std::uint32_t variable_ = 0;
  std::uint32_t negation_ = 0;
  LstmParams clause_, conjecture_;
  FinParams fin_;
};

/// Forward-only evaluation for one bank with optional memoization of term,
/// literal and clause embeddings.
class NeuralEvaluator {
 public:
  NeuralEvaluator(const NeuralModel& model, const TermBank& bank, bool useCache = true);

  ad::Vector embedTerm(TermId t);
  ad::Vector embedLiteral(const Literal& l);
  ad::Vector embedClause(const Clause& c);
  ad::Vector conjectureSummary(std::span<const Clause> conjecture);
  /// (x0, x1); throws on non-finite activations.
  Eigen::Vector2d logits(const Clause& c, const ad::Vector& summary);

  /// Symbol-block applications so far (constant lookups included).
  std::uint64_t blockApplications() const { return applications_; }

 private:
  ad::Vector applyBlock(std::uint32_t block, std::span<const ad::Vector> args);

  const NeuralModel& model_;
  const TermBank& bank_;
  bool useCache_;
  std::uint64_t applications_ = 0;
  std::unordered_map<TermId, ad::Vector> terms_;
  std::unordered_map<std::uint64_t, ad::Vector> literals_;
  std::unordered_map<ClauseId, ad::Vector> clauses_;  // ids identify clauses within one bank
  std::unordered_map<SymbolId, std::uint32_t> blockOf_;
};

/// 1 / (1 + e^(x0 - x1)).
double neuralProbability(const Eigen::Vector2d& logits);
/// 1.0 iff x0 < x1, else 10.0.
double neuralWeight(const Eigen::Vector2d& logits);

/// Frequencies of symbol occurrences over example clauses and their
/// conjectures, keyed as in NeuralModel.
std::unordered_map<std::string, std::uint64_t> symbolFrequencies(std::span<const TrainingExample> examples);

/// Weighted NLL over a set of examples sharing nothing; builds the tape,
/// runs backward when `accumulate` is set, and returns the loss.
double neuralLoss(NeuralModel& model, std::span<const TrainingExample> examples, double positiveWeight,
                  bool accumulate);

std::shared_ptr<NeuralModel> trainNeural(std::span<const TrainingExample> examples, const NeuralConfig& config);

struct AugmentResult {
  std::vector<TrainingExample> examples;
  std::size_t removedNegatives = 0;
};

/// Shuffles conjecture clause order, literal order and equality argument
/// order, then drops negatives equal to a positive of the same conjecture.
AugmentResult augmentExamples(std::span<const TrainingExample> examples, std::uint64_t seed);

}  // namespace clauselab
