#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "clauselab/inference.hpp"
#include "clauselab/parser.hpp"
#include "clauselab/prover.hpp"

namespace clauselab {
namespace {

std::set<std::string> texts(const TermBank& bank, const std::vector<Clause>& cs) {
  std::set<std::string> out;
  for (const Clause& c : cs) out.insert(toString(bank, c));
  return out;
}

TEST(Resolution, TextbookStep) {
  TermBank bank;
  const Clause g = parseClause("p(X) | q(X)", bank);
  const Clause p = parseClause("~p(a)", bank);
  EXPECT_EQ(texts(bank, resolvents(bank, g, p)), std::set<std::string>{"q(a)"});
}

TEST(Resolution, Factor) {
  TermBank bank;
  const Clause g = parseClause("p(X) | p(a)", bank);
  EXPECT_EQ(texts(bank, factors(bank, g)), std::set<std::string>{"p(a)"});
}

TEST(Resolution, NoComplementaryPair) {
  TermBank bank;
  const Clause g = parseClause("p(a)", bank);
  const Clause p = parseClause("p(b)", bank);
  EXPECT_TRUE(inferences(bank, g, p).empty());
}

TEST(Resolution, RenamesApartAndRecordsParents) {
  TermBank bank;
  const Clause g = parseClause("~p(X,Y) | p(Y,X)", bank);
  const Clause p = parseClause("p(f(X),a)", bank);
  const auto rs = resolvents(bank, g, p);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(toString(bank, rs[0]), "p(a,f(X0))");
  EXPECT_EQ(rs[0].inference.parents, (std::vector<ClauseId>{g.id, p.id}));
  EXPECT_EQ(rs[0].inference.rule, InferenceRule::Resolution);
}

TEST(Resolution, DropsTautologiesAndMergesDuplicates) {
  TermBank bank;
  const Clause g = parseClause("p(X) | q(a)", bank);
  const Clause p = parseClause("~p(a) | q(a)", bank);
  EXPECT_EQ(texts(bank, resolvents(bank, g, p)), std::set<std::string>{"q(a)"});
  const Clause t1 = parseClause("p(X) | r(X)", bank);
  const Clause t2 = parseClause("~p(Y) | ~r(Y)", bank);
  EXPECT_TRUE(resolvents(bank, t1, t2).empty());
}

TEST(Resolution, OccursCheck) {
  TermBank bank;
  const Clause g = parseClause("p(X,f(X))", bank);
  const Clause p = parseClause("~p(Y,Y)", bank);
  EXPECT_TRUE(resolvents(bank, g, p).empty());
}

TEST(Resolution, SelfResolutionUsesSeparateCopies) {
  TermBank bank;
  const Clause g = parseClause("~p(X) | p(f(X))", bank);
  EXPECT_EQ(texts(bank, resolvents(bank, g, g)), std::set<std::string>{"p(f(f(X0))) | ~p(X0)"});
}

TEST(Subsumption, Basics) {
  TermBank bank;
  const Clause unit = parseClause("p(X)", bank);
  const Clause big = parseClause("p(a) | q(b)", bank);
  EXPECT_TRUE(subsumes(bank, unit, big));
  EXPECT_FALSE(subsumes(bank, big, unit));
  const Clause two = parseClause("p(X) | p(Y)", bank);
  const Clause one = parseClause("p(a)", bank);
  EXPECT_FALSE(subsumes(bank, two, one));  // multiset: no shrinking onto factors
  const Clause nonlinear = parseClause("r(X,X)", bank);
  EXPECT_FALSE(subsumes(bank, nonlinear, parseClause("r(a,b)", bank)));
  EXPECT_TRUE(subsumes(bank, nonlinear, parseClause("r(b,b) | s", bank)));
  // Target variables are rigid.
  EXPECT_FALSE(subsumes(bank, parseClause("r(a,X)", bank), parseClause("r(X,a)", bank)));
}

TEST(Scheduler, FrequencyPattern) {
  QueueScheduler s({2, 1});
  std::vector<std::size_t> picks;
  for (int i = 0; i < 6; ++i) picks.push_back(*s.next([](std::size_t) { return true; }));
  EXPECT_EQ(picks, (std::vector<std::size_t>{0, 0, 1, 0, 0, 1}));
}

TEST(Scheduler, SkipsExhaustedQueues) {
  QueueScheduler s({2, 3});
  for (int i = 0; i < 5; ++i) EXPECT_EQ(*s.next([](std::size_t q) { return q == 1; }), 1u);
  EXPECT_FALSE(s.next([](std::size_t) { return false; }).has_value());
}

class FakeModel final : public ClauseModel {
 public:
  std::string kind() const override { return "fake"; }
  std::unique_ptr<ClauseWeigher> bind(const TermBank&, std::span<const Clause>) const override {
    struct W final : ClauseWeigher {
      double weight(const Clause&) override { return kPositiveWeight; }
    };
    return std::make_unique<W>();
  }
};

TEST(CombineStrategies, SoloAndCoop) {
  const Strategy s = parseStrategy("1*symbols,2*fifo");
  auto m = std::make_shared<FakeModel>();
  EXPECT_EQ(combineStrategies(s, m, CombineMode::Solo).toString(), "1*model:fake");
  EXPECT_EQ(combineStrategies(s, m, CombineMode::Coop).toString(), "3*model:fake,1*symbols,2*fifo");
  EXPECT_EQ(combineStrategies(parseStrategy("5*symbols"), m, CombineMode::Coop).toString(),
            "5*model:fake,5*symbols");
}

TEST(Strategy, ParseErrors) {
  EXPECT_THROW(parseStrategy(""), std::invalid_argument);
  EXPECT_THROW(parseStrategy("0*fifo"), std::invalid_argument);
  EXPECT_THROW(parseStrategy("2*bogus"), std::invalid_argument);
  EXPECT_THROW(parseStrategy("1*model"), std::invalid_argument);
  EXPECT_EQ(parseStrategy(" 4*symbols , 1*fifo ").toString(), baselineStrategy().toString());
}

TEST(Saturate, OneResolutionStep) {
  const Problem p = parseProblem("cnf(a, axiom, p(a)).\ncnf(g, negated_conjecture, ~p(a)).");
  const RunReport r = saturate(p, baselineStrategy(), Limits{});
  EXPECT_EQ(r.status, RunStatus::Proved);
  ASSERT_EQ(r.proofClauses.size(), 3u);
  EXPECT_TRUE(std::binary_search(r.proofClauses.begin(), r.proofClauses.end(), p.axioms[0].id));
  EXPECT_TRUE(std::binary_search(r.proofClauses.begin(), r.proofClauses.end(), p.conjecture[0].id));
  EXPECT_TRUE(r.trace->at(r.proofClauses.back()).empty());
}

TEST(Saturate, NothingToInfer) {
  const Problem p = parseProblem("cnf(a, axiom, p(a)).");
  const RunReport r = saturate(p, baselineStrategy(), Limits{});
  EXPECT_EQ(r.status, RunStatus::Saturated);
  EXPECT_EQ(r.processedCount, 1u);
  EXPECT_TRUE(r.proofClauses.empty());
}

TEST(Saturate, ResourceLimits) {
  const Problem p = parseProblem(
      "cnf(a, axiom, p(a)).\n"
      "cnf(s, axiom, ~p(X) | p(f(X))).\n"
      "cnf(g, negated_conjecture, ~q).");
  Limits limits;
  limits.maxProcessed = 10;
  const RunReport r = saturate(p, baselineStrategy(), limits);
  EXPECT_EQ(r.status, RunStatus::ResourceOut);
  EXPECT_EQ(r.processedCount, 10u);
  limits.maxProcessed = 1000;
  limits.maxGenerated = 5;
  EXPECT_EQ(saturate(p, baselineStrategy(), limits).status, RunStatus::ResourceOut);
}

TEST(Saturate, FifoTieBreakFollowsClauseIds) {
  const Problem p = parseProblem(
      "cnf(a, axiom, q(b)).\ncnf(b, axiom, r(c)).\ncnf(c, axiom, s(d)).\ncnf(d, axiom, t(e)).");
  const RunReport r = saturate(p, parseStrategy("1*fifo"), Limits{});
  EXPECT_EQ(r.selected, (std::vector<ClauseId>{0, 1, 2, 3}));
  // All four have symbol weight 2: the symbol queue also falls back to ids.
  EXPECT_EQ(saturate(p, parseStrategy("1*symbols"), Limits{}).selected, r.selected);
}

const char* kChain =
    "cnf(a1, axiom, ~le(X,Y) | ~le(Y,Z) | le(X,Z)).\n"
    "cnf(a2, axiom, le(c1,c2)).\n"
    "cnf(a3, axiom, le(c2,c3)).\n"
    "cnf(a4, axiom, le(c3,c4)).\n"
    "cnf(a5, axiom, ~q(X) | r(f(X))).\n"
    "cnf(a6, axiom, q(c1)).\n"
    "cnf(g, negated_conjecture, ~le(c1,c4)).\n";

TEST(Saturate, ProofReplays) {
  const Problem p = parseProblem(kChain);
  const RunReport r = saturate(p, baselineStrategy(), Limits{});
  ASSERT_EQ(r.status, RunStatus::Proved);
  TermBank& bank = *r.trace->bank;
  for (ClauseId id : r.proofClauses) {
    const Clause& c = r.trace->at(id);
    if (c.origin != ClauseOrigin::Derived) continue;
    const auto& parents = c.inference.parents;
    ASSERT_FALSE(parents.empty());
    const Clause& left = r.trace->at(parents[0]);
    const Clause& right = r.trace->at(parents.size() > 1 ? parents[1] : parents[0]);
    Clause replayed;
    replayed.literals = replay(bank, c, left, right);
    EXPECT_EQ(toString(bank, replayed), toString(bank, c)) << "clause " << id;
    // Parents of inferences are always processed clauses.
    for (ClauseId pid : parents) {
      EXPECT_NE(std::find(r.selected.begin(), r.selected.end(), pid), r.selected.end());
    }
  }
}

TEST(Saturate, Deterministic) {
  const Problem p = parseProblem(kChain);
  const RunReport a = saturate(p, baselineStrategy(), Limits{});
  const RunReport b = saturate(p, baselineStrategy(), Limits{});
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.processedCount, b.processedCount);
  EXPECT_EQ(a.generatedCount, b.generatedCount);
  EXPECT_EQ(a.selected, b.selected);
  EXPECT_EQ(a.proofClauses, b.proofClauses);
}

TEST(ExtractExamples, PartitionsSelectedClauses) {
  const Problem p = parseProblem(kChain);
  const RunReport r = saturate(p, baselineStrategy(), Limits{});
  const auto examples = extractExamples(r, p);
  ASSERT_EQ(examples.size(), r.processedCount);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const bool inProof = std::binary_search(r.proofClauses.begin(), r.proofClauses.end(), r.selected[i]);
    EXPECT_EQ(examples[i].positive, inProof);
    positives += examples[i].positive;
    EXPECT_EQ(examples[i].conjecture.size(), 1u);
    EXPECT_EQ(examples[i].problemName, p.name);
    EXPECT_EQ(toString(*examples[i].bank, examples[i].clause), toString(*r.trace->bank, r.trace->at(r.selected[i])));
  }
  // Every proof clause but the empty one was selected.
  EXPECT_EQ(positives, r.proofClauses.size() - 1);
  EXPECT_GT(examples.size(), positives);
}

TEST(ExtractExamples, AllProcessedInProof) {
  const Problem p = parseProblem("cnf(a, axiom, p(a)).\ncnf(g, negated_conjecture, ~p(a)).");
  const RunReport r = saturate(p, baselineStrategy(), Limits{});
  const auto ex = extractExamples(r, p);
  EXPECT_EQ(std::count_if(ex.begin(), ex.end(), [](const auto& e) { return !e.positive; }), 0);
}

TEST(ExtractExamples, RejectsUnprovedRuns) {
  const Problem p = parseProblem("cnf(a, axiom, p(a)).");
  const RunReport r = saturate(p, baselineStrategy(), Limits{});
  EXPECT_THROW(extractExamples(r, p), std::logic_error);
}

TEST(ExamplesIo, RoundTrip) {
  Problem p = parseProblem(kChain);
  p.name = "chain";
  const RunReport r = saturate(p, baselineStrategy(), Limits{});
  const auto examples = extractExamples(r, p);
  std::stringstream buf;
  writeExamples(buf, examples);
  const std::string first = buf.str();
  const auto back = readExamples(buf);
  ASSERT_EQ(back.size(), examples.size());
  std::stringstream again;
  writeExamples(again, back);
  EXPECT_EQ(again.str(), first);
  EXPECT_EQ(back.front().bank, back.back().bank);
}

}  // namespace
}  // namespace clauselab
