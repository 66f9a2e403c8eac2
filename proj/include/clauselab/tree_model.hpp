#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clauselab/features.hpp"
#include "clauselab/strategy.hpp"

namespace clauselab {

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;  // kLeaf for leaves
  double threshold = 0;          // go left iff value < threshold
  bool defaultLeft = true;       // route for absent features
  std::int32_t left = -1;
  std::int32_t right = -1;
  double leafScore = 0;

  bool isLeaf() const { return feature == kLeaf; }
};

/// Node 0 is the root.
class DecisionTree {
 public:
  std::vector<TreeNode> nodes;

  double score(const FeatureVector& v) const;
  std::uint32_t depth() const;
  /// Structural checks: in-bound children, acyclic, features below `dimension`.
  void validate(std::uint32_t dimension) const;
};

struct TreeParams {
  std::uint32_t numTrees = 200;
  std::uint32_t maxDepth = 9;
  double learningRate = 0.3;
  double lambda = 1.0;
  double gamma = 0.0;
  /// Multiplier for positives' gradient and curvature; #neg/#pos if unset.
  std::optional<double> positiveScale;
};

struct FeatureUse {
  std::uint32_t index = 0;
  std::string key;
  std::uint32_t count = 0;
};

class TreeEnsemble final : public ClauseModel {
 public:
  TreeEnsemble(FeatureSpace space, TreeParams params, std::vector<DecisionTree> trees = {});

  const FeatureSpace& space() const { return space_; }
  const TreeParams& params() const { return params_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  void append(DecisionTree t);

  double margin(const FeatureVector& v) const;
  /// logistic(sum of leaf scores).
  double probability(const FeatureVector& v) const;
  bool classify(const FeatureVector& v) const { return probability(v) >= 0.5; }

  std::size_t decisionNodeCount() const;

  /// Decision-node counts per feature, descending, ties by index.
  std::vector<FeatureUse> featureUsage() const;

  /// Training loss after each round, recorded by trainTrees.
  std::vector<double> lossHistory;
  double appliedPositiveScale = 1.0;

  std::string kind() const override { return "trees"; }
  std::unique_ptr<ClauseWeigher> bind(const TermBank& bank, std::span<const Clause> conjecture) const override;

  void save(std::ostream& out) const;
  static std::shared_ptr<TreeEnsemble> load(std::istream& in);

 private:
  FeatureSpace space_;
  TreeParams params_;
  std::vector<DecisionTree> trees_;
};

inline double ensembleScore(const FeatureVector& v, const TreeEnsemble& e) { return e.probability(v); }

std::shared_ptr<TreeEnsemble> trainTrees(const LabeledVectors& data, const FeatureSpace& space,
                                         const TreeParams& params = {});

double treeWeight(const TermBank& bank, const Clause& c, std::span<const Clause> conjecture, const TreeEnsemble& e);

/// Weighted logistic loss used during training, exposed for tests.
double weightedLogisticLoss(std::span<const double> margins, const std::vector<bool>& labels, double positiveScale);

/// Per-example first and second derivatives of that loss in the margin.
void logisticGradients(std::span<const double> margins, const std::vector<bool>& labels, double positiveScale,
                       std::vector<double>& grad, std::vector<double>& hess);

/// Best root split found by the trainer for given gradients and curvatures.
struct SplitChoice {
  std::int32_t feature = TreeNode::kLeaf;
  double threshold = 0;
  bool defaultLeft = true;
  double gain = 0;
};

SplitChoice bestRootSplit(const LabeledVectors& data, std::span<const double> grad, std::span<const double> hess,
                          const TreeParams& params);

}  // namespace clauselab
