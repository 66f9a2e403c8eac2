#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "clauselab/clause.hpp"

namespace clauselab {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ParseOptions {
  std::string problemName;
  /// Bank to intern into; a fresh one is created when null.
  std::shared_ptr<TermBank> bank;
};

/// Parses the CNF subset:
///
///   cnf(<name>, <role>, <literal> | <literal> | ...).
///
/// Roles are axiom, hypothesis and negated_conjecture. `~` negates, `=` and
/// `!=` build the binary predicate `=`, `$false` is the empty clause and `%`
/// starts a line comment.
Problem parseProblem(std::string_view text, ParseOptions options = {});

/// Parses a single disjunction (no cnf(...) wrapper) into `bank`.
Clause parseClause(std::string_view text, TermBank& bank);

/// Prints the problem in the same format; parse(print(p)) reproduces p up to
/// variable naming.
std::string printProblem(const Problem& p);

}  // namespace clauselab
