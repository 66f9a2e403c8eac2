#include "clauselab/inference.hpp"

#include <algorithm>
#include <tuple>

namespace clauselab {

Substitution::Binding& Substitution::slot(int context, std::int32_t var) {
  auto& b = bindings_[context];
  if (static_cast<std::size_t>(var) >= b.size()) b.resize(static_cast<std::size_t>(var) + 1);
  return b[static_cast<std::size_t>(var)];
}

std::pair<TermId, int> Substitution::deref(TermId t, int context) {
  while (bank_.isVariable(t)) {
    const std::int32_t v = bank_.varIndex(t);
    const auto& b = bindings_[context];
    if (static_cast<std::size_t>(v) >= b.size() || b[static_cast<std::size_t>(v)].term == kNoTerm) break;
    const Binding& bound = b[static_cast<std::size_t>(v)];
    t = bound.term;
    context = bound.context;
  }
  return {t, context};
}

bool Substitution::occurs(std::int32_t var, int varContext, TermId t, int context) {
  auto [u, c] = deref(t, context);
  if (bank_.isVariable(u)) return bank_.varIndex(u) == var && c == varContext;
  if (bank_.isGround(u)) return false;
  for (TermId a : bank_.args(u)) {
    if (occurs(var, varContext, a, c)) return true;
  }
  return false;
}

bool Substitution::unify(TermId a, int contextA, TermId b, int contextB) {
  std::vector<std::tuple<TermId, int, TermId, int>> todo{{a, contextA, b, contextB}};
  while (!todo.empty()) {
    auto [s0, c0, t0, d0] = todo.back();
    todo.pop_back();
    auto [s, cs] = deref(s0, c0);
    auto [t, ct] = deref(t0, d0);
    if (s == t && (cs == ct || bank_.isGround(s))) continue;
    if (bank_.isVariable(s) || bank_.isVariable(t)) {
      if (!bank_.isVariable(s)) {
        std::swap(s, t);
        std::swap(cs, ct);
      }
      const std::int32_t v = bank_.varIndex(s);
      if (!bank_.isVariable(t) && occurs(v, cs, t, ct)) return false;
      slot(cs, v) = Binding{t, ct};
      trail_.emplace_back(cs, v);
      continue;
    }
    if (bank_.head(s) != bank_.head(t)) return false;
    const auto sa = bank_.args(s);
    const auto ta = bank_.args(t);
    for (std::size_t i = 0; i < sa.size(); ++i) todo.emplace_back(sa[i], cs, ta[i], ct);
  }
  return true;
}

void Substitution::reset() {
  for (auto [c, v] : trail_) bindings_[c][static_cast<std::size_t>(v)] = Binding{};
  trail_.clear();
  renaming_.clear();
}

TermId Substitution::apply(TermBank& bank, TermId t, int context) {
  auto [u, c] = deref(t, context);
  if (bank.isGround(u)) return u;
  if (bank.isVariable(u)) {
    const std::int64_t key = (static_cast<std::int64_t>(c) << 32) | bank.varIndex(u);
    auto [it, fresh] = renaming_.try_emplace(key, static_cast<std::uint32_t>(renaming_.size()));
    return bank.variable(it->second);
  }
  // Copy first: interning below may reallocate the bank's argument storage.
  std::vector<TermId> args(bank.args(u).begin(), bank.args(u).end());
  for (TermId& a : args) a = apply(bank, a, c);
  return bank.intern(bank.head(u), args);
}

bool isTautology(const std::vector<Literal>& literals) {
  for (std::size_t i = 0; i < literals.size(); ++i) {
    for (std::size_t j = i + 1; j < literals.size(); ++j) {
      if (literals[i].atom == literals[j].atom && literals[i].positive != literals[j].positive) return true;
    }
  }
  return false;
}

bool canonicalize(TermBank& bank, std::vector<Literal>& literals) {
  std::vector<Literal> unique;
  unique.reserve(literals.size());
  for (const Literal& l : literals) {
    if (std::find(unique.begin(), unique.end(), l) == unique.end()) unique.push_back(l);
  }
  if (isTautology(unique)) return false;
  std::stable_sort(unique.begin(), unique.end(), [&](const Literal& a, const Literal& b) {
    return std::make_tuple(!a.positive, bank.head(a.atom), bank.shapeHash(a.atom), bank.size(a.atom)) <
           std::make_tuple(!b.positive, bank.head(b.atom), bank.shapeHash(b.atom), bank.size(b.atom));
  });
  Clause tmp;
  tmp.literals = std::move(unique);
  normalizeVariables(bank, tmp);
  literals = std::move(tmp.literals);
  return true;
}

namespace {

bool buildResolvent(TermBank& bank, Substitution& subst, const Clause& given, std::size_t i,
                    const Clause& partner, std::size_t j, std::vector<Literal>& out) {
  out.clear();
  for (std::size_t k = 0; k < given.literals.size(); ++k) {
    if (k != i) out.push_back({given.literals[k].positive, subst.apply(bank, given.literals[k].atom, 0)});
  }
  for (std::size_t k = 0; k < partner.literals.size(); ++k) {
    if (k != j) out.push_back({partner.literals[k].positive, subst.apply(bank, partner.literals[k].atom, 1)});
  }
  return canonicalize(bank, out);
}

bool buildFactor(TermBank& bank, Substitution& subst, const Clause& given, std::size_t j,
                 std::vector<Literal>& out) {
  out.clear();
  for (std::size_t k = 0; k < given.literals.size(); ++k) {
    if (k != j) out.push_back({given.literals[k].positive, subst.apply(bank, given.literals[k].atom, 0)});
  }
  return canonicalize(bank, out);
}

Clause derived(std::vector<Literal> lits, InferenceRule rule, std::vector<ClauseId> parents, std::size_t i,
               std::size_t j) {
  Clause c;
  c.literals = std::move(lits);
  c.origin = ClauseOrigin::Derived;
  c.inference.rule = rule;
  c.inference.parents = std::move(parents);
  c.inference.leftLiteral = static_cast<std::uint32_t>(i);
  c.inference.rightLiteral = static_cast<std::uint32_t>(j);
  return c;
}

}  // namespace

std::vector<Clause> resolvents(TermBank& bank, const Clause& given, const Clause& partner) {
  std::vector<Clause> out;
  Substitution subst(bank);
  std::vector<Literal> lits;
  for (std::size_t i = 0; i < given.literals.size(); ++i) {
    const Literal& a = given.literals[i];
    for (std::size_t j = 0; j < partner.literals.size(); ++j) {
      const Literal& b = partner.literals[j];
      if (a.positive == b.positive || bank.head(a.atom) != bank.head(b.atom)) continue;
      subst.reset();
      if (!subst.unify(a.atom, 0, b.atom, 1)) continue;
      if (buildResolvent(bank, subst, given, i, partner, j, lits)) {
        out.push_back(derived(lits, InferenceRule::Resolution, {given.id, partner.id}, i, j));
      }
    }
  }
  return out;
}

std::vector<Clause> factors(TermBank& bank, const Clause& given) {
  std::vector<Clause> out;
  Substitution subst(bank);
  std::vector<Literal> lits;
  for (std::size_t i = 0; i < given.literals.size(); ++i) {
    const Literal& a = given.literals[i];
    if (!a.positive) continue;
    for (std::size_t j = i + 1; j < given.literals.size(); ++j) {
      const Literal& b = given.literals[j];
      if (!b.positive || bank.head(a.atom) != bank.head(b.atom)) continue;
      subst.reset();
      if (!subst.unify(a.atom, 0, b.atom, 0)) continue;
      if (buildFactor(bank, subst, given, j, lits)) {
        out.push_back(derived(lits, InferenceRule::Factoring, {given.id}, i, j));
      }
    }
  }
  return out;
}

std::vector<Clause> inferences(TermBank& bank, const Clause& given, const Clause& partner) {
  std::vector<Clause> out = factors(bank, given);
  for (Clause& c : resolvents(bank, given, partner)) out.push_back(std::move(c));
  return out;
}

std::vector<Literal> replay(TermBank& bank, const Clause& child, const Clause& left, const Clause& right) {
  Substitution subst(bank);
  std::vector<Literal> lits;
  const std::size_t i = child.inference.leftLiteral;
  const std::size_t j = child.inference.rightLiteral;
  switch (child.inference.rule) {
    case InferenceRule::Resolution:
      if (!subst.unify(left.literals.at(i).atom, 0, right.literals.at(j).atom, 1)) return {};
      buildResolvent(bank, subst, left, i, right, j, lits);
      break;
    case InferenceRule::Factoring:
      if (!subst.unify(left.literals.at(i).atom, 0, left.literals.at(j).atom, 0)) return {};
      buildFactor(bank, subst, left, j, lits);
      break;
    case InferenceRule::None:
      return child.literals;
  }
  return lits;
}

bool matchTerm(const TermBank& bank, TermId pattern, TermId target, std::vector<TermId>& bindings,
               std::vector<std::int32_t>& trail) {
  if (bank.isGround(pattern)) return pattern == target;
  if (bank.isVariable(pattern)) {
    const auto v = static_cast<std::size_t>(bank.varIndex(pattern));
    if (v >= bindings.size()) bindings.resize(v + 1, kNoTerm);
    if (bindings[v] != kNoTerm) return bindings[v] == target;
    bindings[v] = target;
    trail.push_back(static_cast<std::int32_t>(v));
    return true;
  }
  if (bank.head(pattern) != bank.head(target)) return false;
  const auto pa = bank.args(pattern);
  const auto ta = bank.args(target);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!matchTerm(bank, pa[i], ta[i], bindings, trail)) return false;
  }
  return true;
}

namespace {

struct SubsumptionSearch {
  const TermBank& bank;
  const Clause& general;
  const Clause& specific;
  std::vector<TermId> bindings;
  std::vector<std::int32_t> trail;
  std::vector<bool> used;

  bool search(std::size_t k) {
    if (k == general.literals.size()) return true;
    const Literal& g = general.literals[k];
    for (std::size_t j = 0; j < specific.literals.size(); ++j) {
      const Literal& s = specific.literals[j];
      if (used[j] || s.positive != g.positive || bank.head(s.atom) != bank.head(g.atom)) continue;
      const std::size_t mark = trail.size();
      if (matchTerm(bank, g.atom, s.atom, bindings, trail)) {
        used[j] = true;
        if (search(k + 1)) return true;
        used[j] = false;
      }
      while (trail.size() > mark) {
        bindings[static_cast<std::size_t>(trail.back())] = kNoTerm;
        trail.pop_back();
      }
    }
    return false;
  }
};

}  // namespace

bool subsumes(const TermBank& bank, const Clause& general, const Clause& specific) {
  if (general.literals.size() > specific.literals.size()) return false;
  SubsumptionSearch s{bank, general, specific, {}, {}, std::vector<bool>(specific.literals.size(), false)};
  return s.search(0);
}

std::uint64_t literalSignature(const TermBank& bank, const std::vector<Literal>& literals) {
  std::uint64_t sig = 0;
  for (const Literal& l : literals) {
    const std::uint64_t h = bank.head(l.atom) * 2u + (l.positive ? 1u : 0u);
    sig |= std::uint64_t{1} << (h % 64);
  }
  return sig;
}

}  // namespace clauselab
