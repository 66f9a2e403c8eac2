#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clauselab {

using SymbolId = std::uint32_t;
using TermId = std::uint32_t;
using ClauseId = std::uint32_t;

inline constexpr TermId kNoTerm = 0xffffffffu;

enum class SymbolKind : std::uint8_t { Function, Predicate, Variable, Skolem };

std::string_view toString(SymbolKind kind);

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Function;
  std::uint32_t arity = 0;
};

/// Raised on arity conflicts and malformed term construction.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append-only store of hash-consed terms.
///
/// Every (head, args) pair is interned exactly once, so two handles are equal
/// iff the terms are structurally equal. Variables are terms whose head has
/// kind Variable; the bank keeps them canonically named X0, X1, ... and
/// exposes their index for unification. Clause ids are also issued here since
/// a bank and the clauses built over it live for one proof attempt.
class TermBank {
 public:
  TermBank();

  /// Prefixes marking Skolem symbols when registered through `function`.
  void setSkolemPrefixes(std::vector<std::string> prefixes);
  const std::vector<std::string>& skolemPrefixes() const { return skolemPrefixes_; }

  SymbolId registerSymbol(std::string_view name, SymbolKind kind, std::uint32_t arity);
  /// Registers a function symbol, classifying it as Skolem by prefix.
  SymbolId functionSymbol(std::string_view name, std::uint32_t arity);
  SymbolId predicateSymbol(std::string_view name, std::uint32_t arity);

  const Symbol& symbol(SymbolId id) const { return symbols_[id]; }
  std::size_t symbolCount() const { return symbols_.size(); }

  TermId intern(SymbolId head, std::span<const TermId> args);
  TermId constant(SymbolId head) { return intern(head, {}); }
  TermId variable(std::uint32_t index);

  SymbolId head(TermId t) const { return nodes_[t].head; }
  std::span<const TermId> args(TermId t) const {
    const auto& n = nodes_[t];
    return {args_.data() + n.argBegin, n.arity};
  }
  bool isVariable(TermId t) const { return nodes_[t].varIndex >= 0; }
  std::int32_t varIndex(TermId t) const { return nodes_[t].varIndex; }
  bool isGround(TermId t) const { return nodes_[t].ground; }
  /// Number of symbol occurrences in the term.
  std::uint32_t size(TermId t) const { return nodes_[t].size; }
  std::uint32_t depth(TermId t) const { return nodes_[t].depth; }
  /// Hash of the term with all variables identified.
  std::uint64_t shapeHash(TermId t) const { return nodes_[t].shape; }

  std::size_t termCount() const { return nodes_.size(); }

  ClauseId nextClauseId() { return nextClause_++; }
  ClauseId peekClauseId() const { return nextClause_; }

  std::string toString(TermId t) const;

  /// Copies `t` from another bank, re-registering symbols by name.
  TermId import(const TermBank& other, TermId t);

 private:
  struct Node {
    SymbolId head;
    std::uint32_t argBegin;
    std::uint32_t arity;
    std::int32_t varIndex;
    std::uint32_t size;
    std::uint32_t depth;
    std::uint64_t hash;
    std::uint64_t shape;
    bool ground;
  };

  struct SymbolKey {
    std::string name;
    SymbolKind kind;
    bool operator==(const SymbolKey&) const = default;
  };
  struct SymbolKeyHash {
    std::size_t operator()(const SymbolKey& k) const {
      return std::hash<std::string>{}(k.name) * 31u + static_cast<std::size_t>(k.kind);
    }
  };

  void appendTo(TermId t, std::string& out) const;

  std::vector<Symbol> symbols_;
  std::unordered_map<SymbolKey, SymbolId, SymbolKeyHash> symbolIndex_;
  std::vector<Node> nodes_;
  std::vector<TermId> args_;
  std::unordered_multimap<std::uint64_t, TermId> table_;
  std::vector<TermId> variables_;
  std::vector<std::string> skolemPrefixes_{"esk", "sk"};
  ClauseId nextClause_ = 0;
};

}  // namespace clauselab
