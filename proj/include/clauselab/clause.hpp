#pragma once

#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "clauselab/term_bank.hpp"

namespace clauselab {

struct Literal {
  bool positive = true;
  TermId atom = kNoTerm;

  bool operator==(const Literal&) const = default;
};

enum class ClauseOrigin : std::uint8_t { Input, Conjecture, Derived };

enum class InferenceRule : std::uint8_t { None, Resolution, Factoring };

/// Parent links plus the literal positions the inference acted on, enough
/// to replay it.
struct Inference {
  InferenceRule rule = InferenceRule::None;
  std::vector<ClauseId> parents;
  std::uint32_t leftLiteral = 0;
  std::uint32_t rightLiteral = 0;
};

struct Clause {
  ClauseId id = 0;
  std::vector<Literal> literals;
  ClauseOrigin origin = ClauseOrigin::Input;
  Inference inference;
  std::string name;

  bool empty() const { return literals.empty(); }
};

struct ClauseStats {
  std::size_t length = 0;
  std::size_t positiveCount = 0;
  std::size_t negativeCount = 0;

  bool operator==(const ClauseStats&) const = default;
};

ClauseStats clauseStats(const Clause& c);

/// Renders literals joined by " | ", `$false` for the empty clause.
std::string toString(const TermBank& bank, const Clause& c);

/// Number of symbol occurrences over all atoms.
std::size_t symbolCount(const TermBank& bank, const Clause& c);

/// Renames the clause's variables to X0, X1, ... in left-to-right
/// first-occurrence order, interning rewritten atoms.
void normalizeVariables(TermBank& bank, Clause& c);

struct Problem {
  std::string name;
  std::shared_ptr<TermBank> bank;
  std::vector<Clause> axioms;
  std::vector<Clause> conjecture;
};

}  // namespace clauselab
