#include "clauselab/clause.hpp"

#include <unordered_map>

namespace clauselab {

ClauseStats clauseStats(const Clause& c) {
  ClauseStats s;
  s.length = c.literals.size();
  for (const Literal& l : c.literals) {
    (l.positive ? s.positiveCount : s.negativeCount)++;
  }
  return s;
}

std::string toString(const TermBank& bank, const Clause& c) {
  if (c.literals.empty()) return "$false";
  std::string out;
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " | ";
    if (!c.literals[i].positive) out += '~';
    out += bank.toString(c.literals[i].atom);
  }
  return out;
}

std::size_t symbolCount(const TermBank& bank, const Clause& c) {
  std::size_t n = 0;
  for (const Literal& l : c.literals) n += bank.size(l.atom);
  return n;
}

namespace {

struct Renamer {
  TermBank& bank;
  std::unordered_map<std::int32_t, std::uint32_t> mapping;
  std::unordered_map<TermId, TermId> memo;
  bool identity = true;

  TermId rename(TermId t) {
    if (bank.isGround(t)) return t;
    if (bank.isVariable(t)) {
      const std::int32_t v = bank.varIndex(t);
      auto [it, fresh] = mapping.try_emplace(v, static_cast<std::uint32_t>(mapping.size()));
      if (static_cast<std::uint32_t>(v) != it->second) identity = false;
      return bank.variable(it->second);
    }
    if (auto it = memo.find(t); it != memo.end()) return it->second;
    std::vector<TermId> args(bank.args(t).begin(), bank.args(t).end());
    for (TermId& a : args) a = rename(a);
    const TermId r = bank.intern(bank.head(t), args);
    memo.emplace(t, r);
    return r;
  }
};

}  // namespace

void normalizeVariables(TermBank& bank, Clause& c) {
  Renamer r{bank, {}, {}};
  for (Literal& l : c.literals) l.atom = r.rename(l.atom);
}

}  // namespace clauselab
