#include "clauselab/parser.hpp"

#include <cctype>
#include <unordered_map>
#include <vector>

namespace clauselab {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

// Parsed before interning so that predicate/function roles are known.
struct RawTerm {
  std::string name;
  bool variable = false;
  std::vector<RawTerm> args;
  std::size_t line = 0, column = 0;
};

struct RawLiteral {
  bool positive = true;
  RawTerm atom;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skipSpace() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool atEnd() {
    skipSpace();
    return pos_ >= text_.size();
  }

  char peek() {
    skipSpace();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(std::string_view token) {
    skipSpace();
    if (text_.substr(pos_, token.size()) == token) {
      for (std::size_t i = 0; i < token.size(); ++i) advance();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  std::string identifier() {
    skipSpace();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '$') advance();
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        advance();
      } else {
        break;
      }
    }
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, column_); }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

RawTerm parseTerm(Lexer& lex) {
  lex.skipSpace();
  RawTerm t;
  t.line = lex.line();
  t.column = lex.column();
  t.name = lex.identifier();
  t.variable = std::isupper(static_cast<unsigned char>(t.name[0])) || t.name[0] == '_';
  if (!t.variable && lex.accept("(")) {
    do {
      t.args.push_back(parseTerm(lex));
    } while (lex.accept(","));
    lex.expect(")");
  }
  return t;
}

RawLiteral parseLiteral(Lexer& lex) {
  RawLiteral lit;
  while (lex.accept("~")) lit.positive = !lit.positive;
  RawTerm lhs = parseTerm(lex);
  if (lex.accept("!=")) {
    lit.positive = !lit.positive;
  } else if (!lex.accept("=")) {
    if (lhs.variable) lex.fail("variable used as atom");
    lit.atom = std::move(lhs);
    return lit;
  }
  RawTerm rhs = parseTerm(lex);
  lit.atom.name = "=";
  lit.atom.line = lhs.line;
  lit.atom.column = lhs.column;
  lit.atom.args.push_back(std::move(lhs));
  lit.atom.args.push_back(std::move(rhs));
  return lit;
}

std::vector<RawLiteral> parseDisjunction(Lexer& lex) {
  std::vector<RawLiteral> lits;
  const bool parens = lex.accept("(");
  if (lex.accept("$false")) {
    // empty clause
  } else {
    do {
      lits.push_back(parseLiteral(lex));
    } while (lex.accept("|"));
  }
  if (parens) lex.expect(")");
  return lits;
}

class ClauseBuilder {
 public:
  explicit ClauseBuilder(TermBank& bank) : bank_(bank) {}

  TermId term(const RawTerm& t) {
    if (t.variable) {
      auto [it, fresh] = vars_.try_emplace(t.name, static_cast<std::uint32_t>(vars_.size()));
      return bank_.variable(it->second);
    }
    std::vector<TermId> args;
    args.reserve(t.args.size());
    for (const RawTerm& a : t.args) args.push_back(term(a));
    try {
      const SymbolId s = bank_.functionSymbol(t.name, static_cast<std::uint32_t>(args.size()));
      return bank_.intern(s, args);
    } catch (const StructuralError& e) {
      throw ParseError(e.what(), t.line, t.column);
    }
  }

  Clause clause(const std::vector<RawLiteral>& lits) {
    vars_.clear();
    Clause c;
    for (const RawLiteral& l : lits) {
      std::vector<TermId> args;
      for (const RawTerm& a : l.atom.args) args.push_back(term(a));
      try {
        const SymbolId p = bank_.predicateSymbol(l.atom.name, static_cast<std::uint32_t>(args.size()));
        c.literals.push_back(Literal{l.positive, bank_.intern(p, args)});
      } catch (const StructuralError& e) {
        throw ParseError(e.what(), l.atom.line, l.atom.column);
      }
    }
    c.id = bank_.nextClauseId();
    return c;
  }

 private:
  TermBank& bank_;
  std::unordered_map<std::string, std::uint32_t> vars_;
};

std::string roleName(ClauseOrigin o) {
  return o == ClauseOrigin::Conjecture ? "negated_conjecture" : "axiom";
}

}  // namespace

Problem parseProblem(std::string_view text, ParseOptions options) {
  Problem p;
  p.name = std::move(options.problemName);
  p.bank = options.bank ? std::move(options.bank) : std::make_shared<TermBank>();
  ClauseBuilder builder(*p.bank);
  Lexer lex(text);
  while (!lex.atEnd()) {
    const std::size_t line = lex.line(), column = lex.column();
    const std::string keyword = lex.identifier();
    if (keyword != "cnf") throw ParseError("expected 'cnf', found '" + keyword + "'", line, column);
    lex.expect("(");
    const std::string name = lex.identifier();
    lex.expect(",");
    const std::size_t roleLine = lex.line(), roleColumn = lex.column();
    const std::string role = lex.identifier();
    lex.expect(",");
    const auto lits = parseDisjunction(lex);
    lex.expect(")");
    lex.expect(".");

    Clause c = builder.clause(lits);
    c.name = name;
    if (role == "axiom" || role == "hypothesis") {
      c.origin = ClauseOrigin::Input;
      p.axioms.push_back(std::move(c));
    } else if (role == "negated_conjecture") {
      c.origin = ClauseOrigin::Conjecture;
      p.conjecture.push_back(std::move(c));
    } else {
      throw ParseError("unknown role '" + role + "'", roleLine, roleColumn);
    }
  }
  return p;
}

Clause parseClause(std::string_view text, TermBank& bank) {
  Lexer lex(text);
  ClauseBuilder builder(bank);
  const auto lits = parseDisjunction(lex);
  if (!lex.atEnd()) lex.fail("trailing input after clause");
  return builder.clause(lits);
}

std::string printProblem(const Problem& p) {
  std::string out;
  auto emit = [&](const Clause& c, ClauseOrigin origin) {
    const std::string name = c.name.empty() ? "c" + std::to_string(c.id) : c.name;
    out += "cnf(" + name + ", " + roleName(origin) + ", " + toString(*p.bank, c) + ").\n";
  };
  for (const Clause& c : p.axioms) emit(c, ClauseOrigin::Input);
  for (const Clause& c : p.conjecture) emit(c, ClauseOrigin::Conjecture);
  return out;
}

}  // namespace clauselab
