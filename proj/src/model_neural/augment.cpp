#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "clauselab/inference.hpp"
#include "clauselab/neural_model.hpp"

namespace clauselab {

namespace {

bool isEquality(const TermBank& bank, TermId atom) {
  const Symbol& s = bank.symbol(bank.head(atom));
  return s.kind == SymbolKind::Predicate && s.name == "=" && s.arity == 2;
}

TermId swapEquality(TermBank& bank, TermId atom) {
  const auto args = bank.args(atom);
  const std::vector<TermId> swapped{args[1], args[0]};
  return bank.intern(bank.head(atom), swapped);
}

Clause shuffled(TermBank& bank, const Clause& c, std::mt19937_64& rng) {
  Clause out = c;
  std::shuffle(out.literals.begin(), out.literals.end(), rng);
  for (Literal& l : out.literals) {
    if (isEquality(bank, l.atom) && rng() % 2 == 1) l.atom = swapEquality(bank, l.atom);
  }
  return out;
}

// Identifies clauses up to literal order, equality orientation and
// variable names.
std::string equivalenceKey(TermBank& bank, const Clause& c) {
  std::vector<Literal> lits = c.literals;
  for (Literal& l : lits) {
    if (!isEquality(bank, l.atom)) continue;
    const auto args = bank.args(l.atom);
    auto rank = [&](TermId t) { return std::make_pair(bank.shapeHash(t), bank.size(t)); };
    if (rank(args[1]) < rank(args[0])) l.atom = swapEquality(bank, l.atom);
  }
  Clause canonical;
  const bool tautology = !canonicalize(bank, lits);
  canonical.literals = std::move(lits);
  return (tautology ? "T:" : "") + toString(bank, canonical);
}

}  // namespace

AugmentResult augmentExamples(std::span<const TrainingExample> examples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<const TermBank*, std::shared_ptr<TermBank>> banks;
  std::map<std::pair<const TermBank*, std::string>, std::vector<Clause>> conjectures;

  std::vector<TrainingExample> transformed;
  transformed.reserve(examples.size());
  for (const TrainingExample& e : examples) {
    auto& bank = banks[e.bank.get()];
    if (!bank) bank = std::make_shared<TermBank>(*e.bank);
    std::ostringstream key;
    for (const Clause& c : e.conjecture) key << toString(*e.bank, c) << '\n';
    auto [it, fresh] = conjectures.try_emplace({e.bank.get(), key.str()});
    if (fresh) {
      for (const Clause& c : e.conjecture) it->second.push_back(shuffled(*bank, c, rng));
      std::shuffle(it->second.begin(), it->second.end(), rng);
    }
    TrainingExample t;
    t.bank = bank;
    t.clause = shuffled(*bank, e.clause, rng);
    t.conjecture = it->second;
    t.positive = e.positive;
    t.problemName = e.problemName;
    transformed.push_back(std::move(t));
  }

  // Negatives equal to a positive of the same conjecture are dropped.
  std::set<std::pair<const TermBank*, std::string>> positives;
  std::vector<std::string> keys(transformed.size());
  for (std::size_t i = 0; i < transformed.size(); ++i) {
    const TrainingExample& t = transformed[i];
    TermBank& bank = *banks[examples[i].bank.get()];
    std::ostringstream key;
    for (const Clause& c : examples[i].conjecture) key << toString(*examples[i].bank, c) << '\n';
    keys[i] = key.str() + "\x1f" + equivalenceKey(bank, t.clause);
    if (t.positive) positives.insert({t.bank.get(), keys[i]});
  }
  AugmentResult result;
  for (std::size_t i = 0; i < transformed.size(); ++i) {
    if (!transformed[i].positive && positives.contains({transformed[i].bank.get(), keys[i]})) {
      ++result.removedNegatives;
      continue;
    }
    result.examples.push_back(std::move(transformed[i]));
  }
  return result;
}

}  // namespace clauselab
