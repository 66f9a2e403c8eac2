#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "clauselab/parser.hpp"
#include "clauselab/tree_model.hpp"
#include "test_support.hpp"

namespace clauselab {
namespace {

using testing::push;
using testing::sparse;
using testing::syntheticSpace;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

DecisionTree leafTree(double score) {
  DecisionTree t;
  t.nodes.push_back(TreeNode{.leafScore = score});
  return t;
}

// feature < threshold ? leftScore : rightScore
DecisionTree stump(std::int32_t feature, double threshold, double leftScore, double rightScore, bool defaultLeft = true) {
  DecisionTree t;
  t.nodes.push_back(TreeNode{.feature = feature, .threshold = threshold, .defaultLeft = defaultLeft, .left = 1, .right = 2});
  t.nodes.push_back(TreeNode{.leafScore = leftScore});
  t.nodes.push_back(TreeNode{.leafScore = rightScore});
  return t;
}

// Independent evaluator: explicit recursion, dense lookup.
double oracleNode(const DecisionTree& t, std::size_t id, const std::vector<std::optional<double>>& dense) {
  const TreeNode& n = t.nodes[id];
  if (n.feature < 0) return n.leafScore;
  const auto& v = dense[static_cast<std::size_t>(n.feature)];
  const bool left = v.has_value() ? *v < n.threshold : n.defaultLeft;
  return oracleNode(t, static_cast<std::size_t>(left ? n.left : n.right), dense);
}

double oracleProbability(const TreeEnsemble& e, const FeatureVector& v) {
  std::vector<std::optional<double>> dense(v.dimension);
  for (const auto& [i, x] : v.entries) dense[i] = static_cast<double>(x);
  double sum = 0;
  for (const DecisionTree& t : e.trees()) sum += oracleNode(t, 0, dense);
  return 1.0 / (1.0 + std::exp(-sum));
}

TEST(EnsembleScore, Empty) {
  const FeatureSpace space = syntheticSpace(4);
  const TreeEnsemble e(space, {});
  EXPECT_EQ(ensembleScore(sparse(space, {{1, 2}}), e), 0.5);
  EXPECT_TRUE(e.classify(sparse(space, {})));
}

TEST(EnsembleScore, SingleSplit) {
  const FeatureSpace space = syntheticSpace(5);
  const TreeEnsemble e(space, {}, {stump(3, 1.5, 2, -2)});
  EXPECT_NEAR(ensembleScore(sparse(space, {{3, 1}}), e), logistic(2), 1e-15);
  EXPECT_NEAR(ensembleScore(sparse(space, {{3, 1}}), e), 0.8808, 1e-4);
  EXPECT_NEAR(ensembleScore(sparse(space, {{3, 2}}), e), logistic(-2), 1e-15);
}

TEST(EnsembleScore, Additive) {
  const FeatureSpace space = syntheticSpace(2);
  const TreeEnsemble e(space, {}, {leafTree(1), leafTree(1)});
  EXPECT_NEAR(ensembleScore(sparse(space, {}), e), logistic(2), 1e-15);
}

TEST(EnsembleScore, MatchesBruteForceEvaluator) {
  std::mt19937 rng(77);
  const FeatureSpace space = syntheticSpace(5);
  const std::uint32_t dim = space.vectorDimension();
  std::uniform_real_distribution<double> score(-2, 2);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<DecisionTree> trees;
    for (int k = 0; k < 1 + int(rng() % 6); ++k) {
      DecisionTree t;
      // Random full tree built breadth-first.
      t.nodes.emplace_back();
      std::vector<std::pair<std::size_t, int>> open{{0, 0}};
      while (!open.empty()) {
        auto [id, depth] = open.back();
        open.pop_back();
        if (depth < 4 && rng() % 3 != 0) {
          TreeNode n;
          n.feature = std::int32_t(rng() % dim);
          n.threshold = double(rng() % 5) + (rng() % 2 ? 0.5 : 0.0);
          n.defaultLeft = rng() % 2;
          n.left = std::int32_t(t.nodes.size());
          n.right = n.left + 1;
          t.nodes[id] = n;
          t.nodes.emplace_back();
          t.nodes.emplace_back();
          open.push_back({std::size_t(n.left), depth + 1});
          open.push_back({std::size_t(n.right), depth + 1});
        } else {
          t.nodes[id].leafScore = score(rng);
        }
      }
      trees.push_back(std::move(t));
    }
    const TreeEnsemble e(space, {}, trees);
    for (int q = 0; q < 20; ++q) {
      FeatureVector v;
      v.dimension = dim;
      for (std::uint32_t i = 0; i < dim; ++i) {
        if (rng() % 2) v.entries.push_back({i, std::int64_t(rng() % 6) + 1});
      }
      ASSERT_DOUBLE_EQ(ensembleScore(v, e), oracleProbability(e, v));
    }
  }
}

TEST(TreeWeight, ThresholdIsInclusive) {
  const Problem p = parseProblem("cnf(a, axiom, p(f(X)) | ~q(a)).\ncnf(g, negated_conjecture, ~p(b)).\n");
  const FeatureSpace space = FeatureSpace::hashed(32);
  const Clause& c = p.axioms[0];
  EXPECT_EQ(treeWeight(*p.bank, c, p.conjecture, TreeEnsemble(space, {})), 1.0);
  EXPECT_EQ(treeWeight(*p.bank, c, p.conjecture, TreeEnsemble(space, {}, {stump(0, 1, -10, -10)})), 10.0);
  EXPECT_EQ(treeWeight(*p.bank, c, p.conjecture, TreeEnsemble(space, {}, {stump(0, 1, 10, 10)})), 1.0);
  const TreeEnsemble mixed(space, {}, {stump(5, 2, 0.7, -0.4), stump(40, 1, -0.2, 0.3)});
  auto weigher = mixed.bind(*p.bank, p.conjecture);
  for (const Clause& cl : p.axioms) {
    const double w = weigher->weight(cl);
    EXPECT_TRUE(w == 1.0 || w == 10.0);
    EXPECT_EQ(w, treeWeight(*p.bank, cl, p.conjecture, mixed));
  }
}

TEST(FeatureUsage, CountsDecisionNodes) {
  const FeatureSpace space = syntheticSpace(10);
  DecisionTree t;
  t.nodes = {TreeNode{.feature = 7, .threshold = 2, .left = 1, .right = 2},
             TreeNode{.feature = 7, .threshold = 1, .left = 3, .right = 4},
             TreeNode{.leafScore = 1}, TreeNode{.leafScore = 2}, TreeNode{.leafScore = 3}};
  const TreeEnsemble e(space, {}, {t});
  const auto usage = e.featureUsage();
  ASSERT_EQ(usage.size(), 1u);
  EXPECT_EQ(usage[0].index, 7u);
  EXPECT_EQ(usage[0].key, "f7");
  EXPECT_EQ(usage[0].count, 2u);
  EXPECT_TRUE(TreeEnsemble(space, {}, {leafTree(1)}).featureUsage().empty());

  const TreeEnsemble ties(space, {}, {stump(4, 1, 0, 0), stump(2, 1, 0, 0), stump(12, 1, 0, 0), stump(4, 2, 0, 0)});
  const auto ranked = ties.featureUsage();
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].index, 4u);
  EXPECT_EQ(ranked[1].index, 2u);
  EXPECT_EQ(ranked[2].index, 12u);
  EXPECT_EQ(ranked[2].key, "c|f1");
}

TEST(TrainTrees, SeparatingFeature) {
  const FeatureSpace space = syntheticSpace(4);
  LabeledVectors d;
  std::mt19937 rng(3);
  for (int i = 0; i < 40; ++i) {
    const bool positive = i % 4 == 0;
    push(d, sparse(space, {{0, int(rng() % 3)}, {1, positive ? 5 : 2}, {2, int(rng() % 4)}}), positive);
  }
  TreeParams params;
  params.numTrees = 3;
  const auto e = trainTrees(d, space, params);
  EXPECT_EQ(e->trees()[0].nodes[0].feature, 1);
  for (std::size_t i = 0; i < d.rows.size(); ++i) EXPECT_EQ(e->classify(d.rows[i]), d.labels[i]);
}

LabeledVectors fourExamples(const FeatureSpace& space) {
  LabeledVectors d;
  push(d, sparse(space, {{0, 1}}), true);
  push(d, sparse(space, {{0, 2}}), false);
  push(d, sparse(space, {{1, 1}}), false);
  push(d, sparse(space, {}), false);
  return d;
}

TEST(TrainTrees, SingleLeafClosedForm) {
  const FeatureSpace space = syntheticSpace(2);
  TreeParams params;
  params.numTrees = 1;
  params.maxDepth = 0;
  params.positiveScale = 1.0;
  // At margin 0: p = 1/2, g = p - y, h = 1/4. Sum g = -1/2 + 3/2 = 1, sum h = 1.
  // Leaf = -1 / (1 + lambda) * 0.3 = -0.15.
  const auto e = trainTrees(fourExamples(space), space, params);
  ASSERT_EQ(e->trees().size(), 1u);
  ASSERT_EQ(e->trees()[0].nodes.size(), 1u);
  EXPECT_NEAR(e->trees()[0].nodes[0].leafScore, -0.15, 1e-15);
  EXPECT_NEAR(ensembleScore(sparse(space, {}), *e), logistic(-0.15), 1e-15);

  // Default scale #neg/#pos = 3 balances the classes: g sums to 0.
  params.positiveScale.reset();
  const auto balanced = trainTrees(fourExamples(space), space, params);
  EXPECT_DOUBLE_EQ(balanced->appliedPositiveScale, 3.0);
  EXPECT_NEAR(ensembleScore(sparse(space, {}), *balanced), 0.5, 1e-15);
}

TEST(TrainTrees, RejectsDegenerateData) {
  const FeatureSpace space = syntheticSpace(2);
  LabeledVectors d;
  push(d, sparse(space, {{0, 1}}), true);
  push(d, sparse(space, {{0, 2}}), true);
  EXPECT_THROW(trainTrees(d, space), std::invalid_argument);
  EXPECT_THROW(trainTrees(LabeledVectors{}, space), std::invalid_argument);
}

LabeledVectors noisy(const FeatureSpace& space, unsigned seed, int n) {
  LabeledVectors d;
  std::mt19937 rng(seed);
  for (int i = 0; i < n; ++i) {
    const bool positive = rng() % 5 == 0;
    FeatureVector v;
    v.dimension = space.vectorDimension();
    for (std::uint32_t j = 0; j < v.dimension; ++j) {
      if (rng() % 3 == 0) v.entries.push_back({j, std::int64_t(rng() % 4) + (positive && j % 3 == 0 ? 1 : 0) + 1});
    }
    push(d, std::move(v), positive);
  }
  return d;
}

TEST(TrainTrees, LossNonIncreasingAndDepthBounded) {
  const FeatureSpace space = syntheticSpace(6);
  const LabeledVectors d = noisy(space, 8, 300);
  TreeParams params;
  params.numTrees = 60;
  params.maxDepth = 4;
  const auto e = trainTrees(d, space, params);
  ASSERT_EQ(e->lossHistory.size(), 60u);
  double previous = std::numeric_limits<double>::infinity();
  for (double loss : e->lossHistory) {
    EXPECT_LE(loss, previous + 1e-12);
    previous = loss;
  }
  for (const DecisionTree& t : e->trees()) {
    EXPECT_LE(t.depth(), 4u);
    EXPECT_NO_THROW(t.validate(space.vectorDimension()));
  }
  EXPECT_LE(e->featureUsage().size(), e->decisionNodeCount());
}

// Exhaustive root-split search: every feature, every threshold among the
// present values plus one past the maximum, both absent-value routes.
double exhaustiveBestGain(const LabeledVectors& d, std::span<const double> g, std::span<const double> h, double lambda) {
  auto term = [&](double gs, double hs) { return gs * gs / (hs + lambda); };
  double gAll = 0, hAll = 0;
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    gAll += g[r];
    hAll += h[r];
  }
  double best = 0;
  for (std::uint32_t j = 0; j < d.dimension; ++j) {
    std::set<double> values;
    for (const auto& row : d.rows) {
      for (const auto& [i, x] : row.entries) {
        if (i == j) values.insert(double(x));
      }
    }
    if (values.empty()) continue;
    std::vector<double> thresholds(values.begin(), values.end());
    thresholds.push_back(*values.rbegin() + 1);
    for (double t : thresholds) {
      for (bool defaultLeft : {true, false}) {
        double gl = 0, hl = 0;
        std::size_t nl = 0;
        for (std::size_t r = 0; r < d.rows.size(); ++r) {
          bool present = false;
          double x = 0;
          for (const auto& [i, v] : d.rows[r].entries) {
            if (i == j) {
              present = true;
              x = double(v);
            }
          }
          if (present ? x < t : defaultLeft) {
            gl += g[r];
            hl += h[r];
            ++nl;
          }
        }
        if (nl == 0 || nl == d.rows.size()) continue;
        const double gain = 0.5 * (term(gl, hl) + term(gAll - gl, hAll - hl) - term(gAll, hAll));
        best = std::max(best, gain);
      }
    }
  }
  return best;
}

TEST(TrainTrees, RootSplitMatchesExhaustiveSearch) {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const FeatureSpace space = syntheticSpace(3);
    const int n = 2 + int(rng() % 15);
    LabeledVectors d = noisy(space, unsigned(trial), n);
    d.dimension = space.vectorDimension();
    std::vector<double> g(d.rows.size()), h(d.rows.size());
    for (std::size_t r = 0; r < g.size(); ++r) {
      g[r] = unit(rng) * 2 - 1;
      h[r] = unit(rng) * 0.25 + 0.01;
    }
    const SplitChoice s = bestRootSplit(d, g, h, TreeParams{});
    EXPECT_NEAR(s.gain, exhaustiveBestGain(d, g, h, 1.0), 1e-9) << "trial " << trial;
  }
}

TEST(TreeEnsemble, FileRoundTrip) {
  const FeatureSpace space = syntheticSpace(5);
  const LabeledVectors d = noisy(space, 2, 120);
  TreeParams params;
  params.numTrees = 10;
  params.maxDepth = 3;
  const auto e = trainTrees(d, space, params);
  std::stringstream buf;
  e->save(buf);
  const auto back = TreeEnsemble::load(buf);
  ASSERT_EQ(back->trees().size(), e->trees().size());
  EXPECT_EQ(back->decisionNodeCount(), e->decisionNodeCount());
  EXPECT_FALSE(back->params().positiveScale.has_value());
  for (const auto& r : d.rows) EXPECT_EQ(back->probability(r), e->probability(r));

  std::stringstream truncated("clauselab-trees 1\nparams 1 1 0.3 1 0 auto\nscale 1\nspace hashed 4\ntrees 1\ntree 3\nsplit 0 1 L\nleaf 1\n");
  EXPECT_THROW(TreeEnsemble::load(truncated), std::runtime_error);
}

}  // namespace
}  // namespace clauselab
