#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "clauselab/linear_model.hpp"
#include "clauselab/parser.hpp"
#include "clauselab/prover.hpp"
#include "test_support.hpp"

namespace clauselab {
namespace {

using testing::push;
using testing::sparse;
using testing::syntheticSpace;

double accuracy(const LinearModel& m, const LabeledVectors& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.rows.size(); ++i) ok += m.classify(d.rows[i]) == d.labels[i];
  return double(ok) / double(d.rows.size());
}

TEST(LinearModel, SeparableToySet) {
  const FeatureSpace space = syntheticSpace(2);
  LabeledVectors d;
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; b <= 5; ++b) {
      if (std::abs(a - b) < 2) continue;
      push(d, sparse(space, {{0, a}, {1, b}}), a > b);
    }
  }
  // Separability witness: x0 - x1 has the sign of the label.
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const double margin = double(d.rows[i].at(0) - d.rows[i].at(1));
    ASSERT_EQ(margin > 0, d.labels[i]);
  }
  const auto m = trainLinear(d, space);
  EXPECT_EQ(accuracy(*m, d), 1.0);
}

TEST(LinearModel, SingleLabelData) {
  const FeatureSpace space = syntheticSpace(3);
  for (bool label : {true, false}) {
    LabeledVectors d;
    std::mt19937 rng(5);
    for (int i = 0; i < 30; ++i) {
      push(d, sparse(space, {{0, int(rng() % 4)}, {2, int(rng() % 3)}}), label);
    }
    const auto m = trainLinear(d, space);
    for (const auto& r : d.rows) EXPECT_EQ(m->classify(r), label);
    EXPECT_EQ(m->classify(sparse(space, {})), label);
  }
}

// Overlapping classes with a 1:10 imbalance.
LabeledVectors imbalanced(const FeatureSpace& space, unsigned seed) {
  LabeledVectors d;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> u(0, 4);
  for (int i = 0; i < 400; ++i) {
    const bool positive = i % 11 == 0;
    const int bump = positive ? 1 : 0;
    push(d, sparse(space, {{0, u(rng) + bump}, {1, u(rng)}, {2, u(rng) % 2 + bump}}), positive);
  }
  return d;
}

TEST(LinearModel, UnboostedImbalanceFavoursNegatives) {
  const FeatureSpace space = syntheticSpace(3);
  const auto m = trainLinear(imbalanced(space, 17), space);
  EXPECT_LT(m->meta.tpr, m->meta.tnr);
}

TEST(LinearModel, LossNonIncreasing) {
  const FeatureSpace space = syntheticSpace(3);
  const auto m = trainLinear(imbalanced(space, 3), space);
  ASSERT_FALSE(m->meta.lossHistory.empty());
  for (std::size_t i = 1; i < m->meta.lossHistory.size(); ++i) {
    EXPECT_LE(m->meta.lossHistory[i], m->meta.lossHistory[i - 1]);
  }
}

TEST(LinearModel, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(11);
  std::normal_distribution<double> normal(0, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    const FeatureSpace space = syntheticSpace(4);
    LabeledVectors d;
    for (int i = 0; i < 12; ++i) {
      push(d, sparse(space, {{0, int(rng() % 4)}, {3, int(rng() % 3)}, {6, int(rng() % 5)}, {9, int(rng() % 2)}}),
           rng() % 2 == 0);
    }
    std::vector<std::uint32_t> mult(d.rows.size());
    for (auto& m : mult) m = 1 + rng() % 3;
    std::vector<double> w(space.vectorDimension());
    for (double& x : w) x = normal(rng);
    const double b = normal(rng);
    const double l2 = 0.01;
    std::vector<double> grad;
    double gb = 0;
    logisticObjective(d, mult, w, b, l2, &grad, &gb);

    const double h = 1e-6;
    auto relErr = [](double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-3}); };
    for (std::size_t j = 0; j < w.size(); ++j) {
      auto wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const double numeric =
          (logisticObjective(d, mult, wp, b, l2) - logisticObjective(d, mult, wm, b, l2)) / (2 * h);
      EXPECT_LT(relErr(grad[j], numeric), 1e-6) << "weight " << j;
    }
    const double numericBias =
        (logisticObjective(d, mult, w, b + h, l2) - logisticObjective(d, mult, w, b - h, l2)) / (2 * h);
    EXPECT_LT(relErr(gb, numericBias), 1e-6);
  }
}

TEST(LinearModel, Errors) {
  const FeatureSpace space = syntheticSpace(2);
  EXPECT_THROW(trainLinear(LabeledVectors{}, space), std::invalid_argument);
  LabeledVectors d;
  push(d, sparse(syntheticSpace(5), {{0, 1}}), true);
  EXPECT_THROW(trainLinear(d, space), std::invalid_argument);
  LabeledVectors one;
  push(one, sparse(space, {{0, 1}}), true);
  EXPECT_THROW(boostBalance(one, space), std::invalid_argument);
}

TEST(BoostBalance, AlreadyBalancedNeedsNoIterations) {
  const FeatureSpace space = syntheticSpace(2);
  LabeledVectors d;
  for (int i = 0; i < 10; ++i) {
    push(d, sparse(space, {{0, 3}}), true);
    push(d, sparse(space, {{1, 3}}), false);
  }
  const BoostResult r = boostBalance(d, space);
  EXPECT_FALSE(r.flagged);
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_EQ(r.model->meta.boostIterations, 0u);
}

TEST(BoostBalance, GrowsPositivesUntilBalanced) {
  const FeatureSpace space = syntheticSpace(3);
  const LabeledVectors d = imbalanced(space, 17);
  const BoostResult r = boostBalance(d, space);
  ASSERT_GE(r.log.size(), 2u);
  for (std::size_t i = 1; i < r.log.size(); ++i) {
    EXPECT_GT(r.log[i].positiveMultisetSize, r.log[i - 1].positiveMultisetSize);
  }
  if (!r.flagged) {
    EXPECT_GE(r.log.back().tpr, r.log.back().tnr);
    EXPECT_GE(r.model->meta.tpr, r.model->meta.tnr);
  }
}

TEST(BoostBalance, FlagsWhenIterationsRunOut) {
  const FeatureSpace space = syntheticSpace(3);
  const BoostResult r = boostBalance(imbalanced(space, 17), space, {}, 0);
  EXPECT_TRUE(r.flagged);
  EXPECT_TRUE(r.model->meta.boostFlagged);
  EXPECT_EQ(r.log.size(), 1u);
}

TEST(LinearWeight, ConstantModels) {
  const Problem p = parseProblem("cnf(a, axiom, p(f(X)) | ~q(a)).\ncnf(g, negated_conjecture, ~p(b)).\n");
  const FeatureSpace space = FeatureSpace::hashed(64);
  const Clause& c = p.axioms[0];
  const std::vector<double> zero(space.vectorDimension(), 0.0);
  EXPECT_EQ(linearWeight(*p.bank, c, p.conjecture, LinearModel(space, zero, 1.0)), 1.0);
  EXPECT_EQ(linearWeight(*p.bank, c, p.conjecture, LinearModel(space, zero, -1.0)), 10.0);
  EXPECT_EQ(linearWeight(*p.bank, c, p.conjecture, LinearModel(space, zero, 0.0)), 10.0);
}

TEST(LinearWeight, PositiveRescalingInvariant) {
  const Problem p = parseProblem(
      "cnf(a, axiom, p(f(X)) | ~q(a)).\ncnf(b, axiom, q(g(a,b))).\ncnf(c, axiom, ~p(X) | r(X,X)).\n"
      "cnf(g, negated_conjecture, ~r(b,a)).\n");
  const FeatureSpace space = FeatureSpace::hashed(32);
  std::mt19937 rng(9);
  std::normal_distribution<double> normal(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(space.vectorDimension());
    for (double& x : w) x = normal(rng);
    const double b = normal(rng);
    const double k = std::exp(normal(rng) * 2);
    std::vector<double> scaled(w);
    for (double& x : scaled) x *= k;
    const LinearModel base(space, w, b), big(space, scaled, b * k);
    for (const Clause& c : p.axioms) {
      const double wb = linearWeight(*p.bank, c, p.conjecture, base);
      EXPECT_TRUE(wb == 1.0 || wb == 10.0);
      EXPECT_EQ(wb, linearWeight(*p.bank, c, p.conjecture, big));
    }
  }
}

TEST(LinearModel, WeigherAgreesWithLinearWeight) {
  const Problem p = parseProblem(
      "cnf(a, axiom, p(f(X)) | ~q(a)).\ncnf(b, axiom, q(g(a,b))).\ncnf(g, negated_conjecture, ~p(b)).\n");
  const FeatureSpace space = FeatureSpace::hashed(16);
  std::vector<double> w(space.vectorDimension());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (i % 3 == 0) ? 0.4 : -0.3;
  const LinearModel m(space, w, 0.1);
  auto weigher = m.bind(*p.bank, p.conjecture);
  for (const Clause& c : p.axioms) EXPECT_EQ(weigher->weight(c), linearWeight(*p.bank, c, p.conjecture, m));
}

TEST(LinearModel, FileRoundTrip) {
  const FeatureSpace space = syntheticSpace(3);
  const LabeledVectors d = imbalanced(space, 4);
  const auto m = trainLinear(d, space);
  std::stringstream buf;
  m->save(buf);
  const auto back = LinearModel::load(buf);
  EXPECT_EQ(back->bias(), m->bias());
  ASSERT_EQ(back->weights().size(), m->weights().size());
  for (std::size_t i = 0; i < d.rows.size(); ++i) EXPECT_EQ(back->score(d.rows[i]), m->score(d.rows[i]));
  EXPECT_EQ(back->space().keys(), space.keys());

  std::stringstream bad("clauselab-linear 99\n");
  EXPECT_THROW(LinearModel::load(bad), std::runtime_error);
}

}  // namespace
}  // namespace clauselab
