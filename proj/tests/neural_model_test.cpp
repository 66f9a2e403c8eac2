#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "clauselab/neural_model.hpp"
#include "clauselab/parser.hpp"

namespace clauselab {
namespace {

NeuralConfig tinyConfig(std::uint32_t n = 4, std::uint32_t m = 2) {
  NeuralConfig c;
  c.n = n;
  c.m = m;
  c.maxSharedArity = 2;
  c.rareThreshold = 1;
  return c;
}

const std::vector<std::string> kKeys = {"f/0/a", "f/0/b", "f/1/f", "f/2/g", "p/1/p", "p/2/q", "p/2/="};

// Random clause text over a fixed vocabulary with variables, Skolem
// constants, equality and negation.
class ClauseGen {
 public:
  explicit ClauseGen(unsigned seed) : rng_(seed) {}

  std::string term(int depth) {
    const int pick = int(rng_() % (depth > 2 ? 4 : 7));
    switch (pick) {
      case 0: return "a";
      case 1: return "b";
      case 2: return "X" + std::to_string(rng_() % 3);
      case 3: return "esk" + std::to_string(rng_() % 2);
      case 4: return "f(" + term(depth + 1) + ")";
      case 5: return "g(" + term(depth + 1) + "," + term(depth + 1) + ")";
      default: return "h(" + term(depth + 1) + ")";  // rare symbol
    }
  }

  std::string literal() {
    std::string atom;
    switch (rng_() % 4) {
      case 0: atom = "p(" + term(1) + ")"; break;
      case 1: atom = "q(" + term(1) + "," + term(1) + ")"; break;
      case 2: atom = term(1) + " = " + term(1); break;
      default: atom = "r(" + term(1) + ")"; break;
    }
    return (rng_() % 2 ? "~" : "") + atom;
  }

  std::string clause() {
    const int len = 1 + int(rng_() % 3);
    std::string out;
    for (int i = 0; i < len; ++i) out += (i ? " | " : "") + literal();
    return out;
  }

 private:
  std::mt19937 rng_;
};

TEST(NeuralEmbedding, ConstantIsItsVector) {
  const NeuralModel model(tinyConfig(), kKeys);
  TermBank bank;
  const Clause c = parseClause("p(a)", bank);
  NeuralEvaluator eval(model, bank);
  const TermId a = bank.args(c.literals[0].atom)[0];
  const auto& block = model.block(model.blockFor(bank.symbol(bank.head(a))));
  EXPECT_EQ(block.arity, 0u);
  EXPECT_EQ(eval.embedTerm(a), ad::Vector(model.parameters()[block.weight].value.col(0)));
}

TEST(NeuralEmbedding, CacheHitsAndCounters) {
  const NeuralModel model(tinyConfig(), kKeys);
  TermBank bank;
  const Clause c = parseClause("p(g(a,b)) | p(f(g(a,b)))", bank);
  const TermId gab = bank.args(c.literals[0].atom)[0];
  const TermId fgab = bank.args(c.literals[1].atom)[0];
  NeuralEvaluator eval(model, bank);
  eval.embedTerm(gab);
  EXPECT_EQ(eval.blockApplications(), 3u);  // a, b, g
  eval.embedTerm(gab);
  EXPECT_EQ(eval.blockApplications(), 3u);  // cached: nothing applied
  eval.embedTerm(fgab);
  EXPECT_EQ(eval.blockApplications(), 4u);  // only f over the cached argument

  NeuralEvaluator uncached(model, bank, false);
  uncached.embedTerm(gab);
  uncached.embedTerm(gab);
  EXPECT_EQ(uncached.blockApplications(), 6u);
}

TEST(NeuralEmbedding, VariablesShareOneVector) {
  const NeuralModel model(tinyConfig(), kKeys);
  TermBank bank;
  const Clause c = parseClause("q(X,Y)", bank);
  NeuralEvaluator eval(model, bank);
  const auto args = bank.args(c.literals[0].atom);
  ASSERT_NE(args[0], args[1]);
  EXPECT_EQ(eval.embedTerm(args[0]), eval.embedTerm(args[1]));
}

TEST(NeuralEmbedding, EmptyClauseAndConjectureGiveZeroStateProjection) {
  const NeuralModel model(tinyConfig(), kKeys);
  TermBank bank;
  NeuralEvaluator eval(model, bank);
  const Clause empty = parseClause("$false", bank);
  EXPECT_EQ(eval.embedClause(empty), ad::Vector(model.parameters()[model.clauseCombiner().projectionBias].value.col(0)));
  EXPECT_EQ(eval.conjectureSummary({}),
            ad::Vector(model.parameters()[model.conjectureCombiner().projectionBias].value.col(0)));
  const Clause unit = parseClause("p(a)", bank);
  EXPECT_NE(eval.embedClause(unit), eval.embedClause(empty));
}

TEST(NeuralEmbedding, ConjectureOrderMatters) {
  const NeuralModel model(tinyConfig(8, 4), kKeys);
  TermBank bank;
  const std::vector<Clause> forward{parseClause("p(a)", bank), parseClause("~q(b,f(a))", bank)};
  const std::vector<Clause> backward{forward[1], forward[0]};
  NeuralEvaluator eval(model, bank);
  EXPECT_NE(eval.conjectureSummary(forward), eval.conjectureSummary(backward));
}

TEST(NeuralEmbedding, CacheIsTransparent) {
  NeuralConfig cfg = tinyConfig(8, 4);
  cfg.seed = 3;
  const NeuralModel model(cfg, kKeys);
  TermBank bank;
  ClauseGen gen(42);
  const std::vector<Clause> conj{parseClause(gen.clause(), bank), parseClause(gen.clause(), bank)};
  NeuralEvaluator cached(model, bank, true);
  NeuralEvaluator plain(model, bank, false);
  const ad::Vector s1 = cached.conjectureSummary(conj), s2 = plain.conjectureSummary(conj);
  ASSERT_EQ(s1, s2);
  for (int i = 0; i < 1000; ++i) {
    const Clause c = parseClause(gen.clause(), bank);
    const Eigen::Vector2d x = cached.logits(c, s1);
    ASSERT_EQ(x, plain.logits(c, s2)) << toString(bank, c);
    ASSERT_EQ(x, cached.logits(c, s1));
    EXPECT_EQ(neuralWeight(x) == 1.0, neuralProbability(x) > 0.5);
  }
}

TEST(NeuralWeight, StrictInequality) {
  EXPECT_EQ(neuralProbability({0.3, 0.3}), 0.5);
  EXPECT_EQ(neuralWeight({0.3, 0.3}), 10.0);
  EXPECT_EQ(neuralWeight({-1e300, 1e300}), 1.0);
  EXPECT_NEAR(neuralProbability({-1e3, 1e3}), 1.0, 1e-15);
  EXPECT_EQ(neuralWeight({2, 1}), 10.0);
}

TEST(NeuralWeight, VariableRenamingInvariant) {
  const NeuralModel model(tinyConfig(8, 4), kKeys);
  auto bank = std::make_shared<TermBank>();
  const Clause a = parseClause("q(X,Y) | ~p(f(Y))", *bank);
  const Clause b = parseClause("q(Z,W) | ~p(f(W))", *bank);
  auto weigher = model.bind(*bank, {});
  NeuralEvaluator eval(model, *bank);
  const ad::Vector s = eval.conjectureSummary({});
  EXPECT_EQ(eval.logits(a, s), eval.logits(b, s));
  EXPECT_EQ(weigher->weight(a), weigher->weight(b));
}

std::vector<TrainingExample> randomExamples(unsigned seed, int count) {
  auto bank = std::make_shared<TermBank>();
  ClauseGen gen(seed);
  std::vector<Clause> conj{parseClause(gen.clause(), *bank)};
  std::vector<TrainingExample> out;
  for (int i = 0; i < count; ++i) {
    TrainingExample e;
    e.bank = bank;
    e.clause = parseClause(gen.clause(), *bank);
    e.conjecture = conj;
    e.positive = i % 2 == 0;
    out.push_back(std::move(e));
  }
  return out;
}

TEST(NeuralGradient, MatchesFiniteDifferences) {
  for (unsigned instance = 0; instance < 10; ++instance) {
    NeuralConfig cfg = tinyConfig(4, 2);
    cfg.seed = 100 + instance;
    NeuralModel model(cfg, kKeys);
    // Wider weights and positive biases keep most rectifiers active so every
    // block receives a gradient.
    std::mt19937 rng(instance);
    std::uniform_real_distribution<double> weight(-1, 1), bias(0.2, 1);
    for (auto& p : model.parameters()) {
      const bool isBias = p.value.cols() == 1 && p.name.find("sym:") != 0;
      for (Eigen::Index k = 0; k < p.value.size(); ++k) p.value(k) = isBias ? bias(rng) : weight(rng);
    }
    const auto examples = randomExamples(instance, 3);
    for (auto& p : model.parameters()) p.zeroGrad();
    neuralLoss(model, examples, 2.5, true);
    const double h = 1e-6;
    std::size_t checked = 0;
    for (auto& p : model.parameters()) {
      for (Eigen::Index k = 0; k < p.value.size(); ++k) {
        const double saved = p.value(k);
        p.value(k) = saved + h;
        const double up = neuralLoss(model, examples, 2.5, false);
        p.value(k) = saved - h;
        const double down = neuralLoss(model, examples, 2.5, false);
        p.value(k) = saved;
        const double numeric = (up - down) / (2 * h);
        const double analytic = p.grad(k);
        const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-5});
        ASSERT_LT(rel, 1e-4) << p.name << "[" << k << "] analytic " << analytic << " numeric " << numeric;
        checked += analytic != 0;
      }
    }
    EXPECT_GT(checked, 50u);
  }
}

std::vector<TrainingExample> toySet() {
  auto bank = std::make_shared<TermBank>();
  const std::vector<Clause> conj{parseClause("~r(a)", *bank)};
  std::vector<TrainingExample> out;
  for (int i = 0; i < 10; ++i) {
    out.push_back({bank, parseClause("p(a)", *bank), conj, true, "toy"});
    out.push_back({bank, parseClause("q(a)", *bank), conj, false, "toy"});
  }
  return out;
}

TEST(TrainNeural, SeparatesToySet) {
  NeuralConfig cfg;
  cfg.n = 8;
  cfg.m = 4;
  const auto examples = toySet();
  const auto model = trainNeural(examples, cfg);
  ASSERT_EQ(model->lossHistory.size(), 50u);
  for (std::size_t e = 1; e < 5; ++e) EXPECT_LE(model->lossHistory[e], model->lossHistory[e - 1]);
  for (const TrainingExample& ex : examples) {
    auto weigher = model->bind(*ex.bank, ex.conjecture);
    EXPECT_EQ(weigher->weight(ex.clause), ex.positive ? 1.0 : 10.0);
  }
}

TEST(TrainNeural, ZeroEpochsKeepsInitialization) {
  NeuralConfig cfg;
  cfg.n = 8;
  cfg.m = 4;
  cfg.epochs = 0;
  const auto model = trainNeural(toySet(), cfg);
  // r occurs once (conjecture counted once), below the rare threshold.
  const NeuralModel fresh(cfg, {"f/0/a", "p/1/p", "p/1/q"});
  ASSERT_EQ(model->parameters().size(), fresh.parameters().size());
  for (std::size_t i = 0; i < fresh.parameters().size(); ++i) {
    EXPECT_EQ(model->parameters()[i].name, fresh.parameters()[i].name);
    EXPECT_EQ(model->parameters()[i].value, fresh.parameters()[i].value);
  }
}

TEST(TrainNeural, RejectsBadInput) {
  auto examples = toySet();
  for (auto& e : examples) e.positive = true;
  EXPECT_THROW(trainNeural(examples, NeuralConfig{}), std::invalid_argument);
  NeuralConfig bad;
  bad.m = 80;
  EXPECT_THROW(trainNeural(toySet(), bad), std::invalid_argument);
}

TEST(TrainNeural, RareSymbolsShareBlocks) {
  NeuralConfig cfg = tinyConfig();
  cfg.rareThreshold = 10;
  cfg.epochs = 0;
  auto examples = toySet();
  examples.push_back({examples[0].bank, parseClause("s(c) | s(d)", const_cast<TermBank&>(*examples[0].bank)),
                      examples[0].conjecture, false, "toy"});
  const auto model = trainNeural(examples, cfg);
  const TermBank& bank = *examples[0].bank;
  const Clause& odd = examples.back().clause;
  const SymbolId c = bank.head(bank.args(odd.literals[0].atom)[0]);
  const SymbolId d = bank.head(bank.args(odd.literals[1].atom)[0]);
  EXPECT_EQ(model->blockFor(bank.symbol(c)), model->blockFor(bank.symbol(d)));
  EXPECT_NE(model->blockFor(bank.symbol(bank.head(examples[0].clause.literals[0].atom))),
            model->blockFor(bank.symbol(bank.head(odd.literals[0].atom))));
}

TEST(NeuralModel, FileRoundTrip) {
  NeuralConfig cfg = tinyConfig(6, 3);
  cfg.seed = 9;
  const NeuralModel model(cfg, kKeys);
  std::stringstream buf;
  model.save(buf);
  const auto back = NeuralModel::load(buf);
  TermBank bank;
  ClauseGen gen(5);
  NeuralEvaluator a(model, bank), b(*back, bank);
  const ad::Vector sa = a.conjectureSummary({}), sb = b.conjectureSummary({});
  for (int i = 0; i < 50; ++i) {
    const Clause c = parseClause(gen.clause(), bank);
    EXPECT_EQ(a.logits(c, sa), b.logits(c, sb));
  }
  std::stringstream bad("clauselab-neural 1\nconfig 4 2 10 sigmoid 2 0\n");
  EXPECT_THROW(NeuralModel::load(bad), std::runtime_error);
}

TEST(NeuralModel, ProbabilityOrderingFlag) {
  NeuralConfig cfg = tinyConfig(6, 3);
  cfg.probabilityOrdering = true;
  const NeuralModel model(cfg, kKeys);
  TermBank bank;
  ClauseGen gen(8);
  auto weigher = model.bind(bank, {});
  NeuralEvaluator eval(model, bank);
  const ad::Vector s = eval.conjectureSummary({});
  for (int i = 0; i < 20; ++i) {
    const Clause c = parseClause(gen.clause(), bank);
    EXPECT_DOUBLE_EQ(weigher->weight(c), 1.0 + 9.0 * (1.0 - neuralProbability(eval.logits(c, s))));
  }
}

TEST(AugmentExamples, RemovesNegativesEqualToPositives) {
  auto bank = std::make_shared<TermBank>();
  const std::vector<Clause> conj{parseClause("~r(a) | a = b", *bank), parseClause("p(b)", *bank)};
  std::vector<TrainingExample> examples{
      {bank, parseClause("q(X,a) | p(X)", *bank), conj, true, "t"},
      {bank, parseClause("p(Y) | q(Y,a)", *bank), conj, false, "t"},
      {bank, parseClause("f(a) = b | p(b)", *bank), conj, true, "t"},
      {bank, parseClause("b = f(a) | p(b)", *bank), conj, false, "t"},
      {bank, parseClause("q(a,a)", *bank), conj, false, "t"},
  };
  const AugmentResult r = augmentExamples(examples, 7);
  EXPECT_EQ(r.removedNegatives, 2u);
  ASSERT_EQ(r.examples.size(), 3u);
  EXPECT_EQ(std::count_if(r.examples.begin(), r.examples.end(), [](const auto& e) { return e.positive; }), 2);
  for (const auto& e : r.examples) EXPECT_EQ(e.conjecture.size(), 2u);
}

TEST(AugmentExamples, ShufflesAndSwaps) {
  auto bank = std::make_shared<TermBank>();
  const std::vector<Clause> conj{parseClause("~r(a)", *bank), parseClause("p(b)", *bank), parseClause("p(a)", *bank)};
  const std::vector<TrainingExample> examples{{bank, parseClause("a = b | p(a) | q(a,b)", *bank), conj, true, "t"}};
  bool swapped = false, reordered = false, conjMoved = false;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const AugmentResult r = augmentExamples(examples, seed);
    ASSERT_EQ(r.examples.size(), 1u);
    const TrainingExample& e = r.examples[0];
    ASSERT_EQ(e.clause.literals.size(), 3u);
    for (const Literal& l : e.clause.literals) {
      const std::string text = toString(*e.bank, Clause{.literals = {l}});
      swapped |= text == "b = a";
    }
    reordered |= toString(*e.bank, e.clause).rfind("a = b", 0) != 0;
    conjMoved |= toString(*e.bank, e.conjecture[0]) != "~r(a)";
  }
  EXPECT_TRUE(swapped);
  EXPECT_TRUE(reordered);
  EXPECT_TRUE(conjMoved);
}

}  // namespace
}  // namespace clauselab
