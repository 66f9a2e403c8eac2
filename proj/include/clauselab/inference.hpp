#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "clauselab/clause.hpp"

namespace clauselab {

/// Most general unifiers over two variable contexts of one bank, so that two
/// clauses (or two copies of one clause) never need explicit renaming apart.
class Substitution {
 public:
  explicit Substitution(const TermBank& bank) : bank_(bank) {}

  bool unify(TermId a, int contextA, TermId b, int contextB);
  void reset();

  /// Instantiates `t` from `context`, naming unbound variables X0, X1, ...
  /// in first-occurrence order shared across calls until `reset`.
  TermId apply(TermBank& bank, TermId t, int context);

 private:
  struct Binding {
    TermId term = kNoTerm;
    int context = 0;
  };

  Binding& slot(int context, std::int32_t var);
  std::pair<TermId, int> deref(TermId t, int context);
  bool occurs(std::int32_t var, int varContext, TermId t, int context);

  const TermBank& bank_;
  std::vector<Binding> bindings_[2];
  std::vector<std::pair<int, std::int32_t>> trail_;
  std::unordered_map<std::int64_t, std::uint32_t> renaming_;
};

/// Puts a derived literal list into canonical form: duplicate literals are
/// merged, literals are ordered by a variable-insensitive key and variables
/// renumbered. Returns false when the clause is a tautology.
bool canonicalize(TermBank& bank, std::vector<Literal>& literals);

/// Binary resolvents of `given` with `partner` (which may be the same clause)
/// on all complementary unifiable literal pairs. Tautologies are dropped.
/// Results carry parents and literal positions but no id.
std::vector<Clause> resolvents(TermBank& bank, const Clause& given, const Clause& partner);

/// Positive factors of `given`.
std::vector<Clause> factors(TermBank& bank, const Clause& given);

/// Both of the above, factors first.
std::vector<Clause> inferences(TermBank& bank, const Clause& given, const Clause& partner);

/// Re-derives a clause from its recorded inference.
std::vector<Literal> replay(TermBank& bank, const Clause& derived, const Clause& left, const Clause& right);

bool isTautology(const std::vector<Literal>& literals);

/// Multiset subsumption: some substitution maps the literals of `general`
/// injectively onto literals of `specific`.
bool subsumes(const TermBank& bank, const Clause& general, const Clause& specific);

/// One-way matching of `pattern` onto `target`, extending `bindings`
/// (indexed by pattern variable). Target variables are treated as constants.
bool matchTerm(const TermBank& bank, TermId pattern, TermId target, std::vector<TermId>& bindings,
               std::vector<std::int32_t>& trail);

/// Bit signature over (sign, predicate) pairs for subsumption prefiltering.
std::uint64_t literalSignature(const TermBank& bank, const std::vector<Literal>& literals);

}  // namespace clauselab
