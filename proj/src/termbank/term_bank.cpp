#include "clauselab/term_bank.hpp"

#include <algorithm>

namespace clauselab {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0xff51afd7ed558ccdULL;
}

constexpr std::uint64_t kVariableShape = 0x5bd1e9955bd1e995ULL;

}  // namespace

std::string_view toString(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Function: return "function";
    case SymbolKind::Predicate: return "predicate";
    case SymbolKind::Variable: return "variable";
    case SymbolKind::Skolem: return "skolem";
  }
  return "?";
}

TermBank::TermBank() { nodes_.reserve(256); }

void TermBank::setSkolemPrefixes(std::vector<std::string> prefixes) {
  skolemPrefixes_ = std::move(prefixes);
}

SymbolId TermBank::registerSymbol(std::string_view name, SymbolKind kind, std::uint32_t arity) {
  if (kind == SymbolKind::Variable && arity != 0) {
    throw StructuralError("variable '" + std::string(name) + "' must have arity 0");
  }
  // Skolem and ordinary function symbols share one namespace.
  const SymbolKind keyKind = kind == SymbolKind::Skolem ? SymbolKind::Function : kind;
  SymbolKey key{std::string(name), keyKind};
  if (auto it = symbolIndex_.find(key); it != symbolIndex_.end()) {
    const Symbol& s = symbols_[it->second];
    if (s.arity != arity) {
      throw StructuralError("arity conflict for " + std::string(clauselab::toString(s.kind)) + " '" +
                            s.name + "': registered with arity " + std::to_string(s.arity) +
                            ", used with arity " + std::to_string(arity));
    }
    return it->second;
  }
  const auto id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(Symbol{std::string(name), kind, arity});
  symbolIndex_.emplace(std::move(key), id);
  return id;
}

SymbolId TermBank::functionSymbol(std::string_view name, std::uint32_t arity) {
  const bool skolem = std::any_of(skolemPrefixes_.begin(), skolemPrefixes_.end(),
                                  [&](const std::string& p) { return name.starts_with(p); });
  return registerSymbol(name, skolem ? SymbolKind::Skolem : SymbolKind::Function, arity);
}

SymbolId TermBank::predicateSymbol(std::string_view name, std::uint32_t arity) {
  return registerSymbol(name, SymbolKind::Predicate, arity);
}

TermId TermBank::intern(SymbolId head, std::span<const TermId> args) {
  if (head >= symbols_.size()) throw StructuralError("unknown symbol id");
  const Symbol& sym = symbols_[head];
  if (args.size() != sym.arity) {
    throw StructuralError("symbol '" + sym.name + "' has arity " + std::to_string(sym.arity) +
                          " but was given " + std::to_string(args.size()) + " arguments");
  }
  std::uint64_t h = mix(0x12345ULL, head);
  for (TermId a : args) {
    if (a >= nodes_.size()) throw StructuralError("argument not interned in this bank");
    h = mix(h, nodes_[a].hash);
  }
  auto [lo, hi] = table_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    const Node& n = nodes_[it->second];
    if (n.head == head && std::equal(args.begin(), args.end(), args_.begin() + n.argBegin)) {
      return it->second;
    }
  }

  Node node{};
  node.head = head;
  node.argBegin = static_cast<std::uint32_t>(args_.size());
  node.arity = static_cast<std::uint32_t>(args.size());
  node.varIndex = -1;
  node.size = 1;
  node.depth = 1;
  node.hash = h;
  node.ground = sym.kind != SymbolKind::Variable;
  std::uint64_t shape = mix(0x777ULL, head);
  for (TermId a : args) {
    const Node& an = nodes_[a];
    node.size += an.size;
    node.depth = std::max(node.depth, an.depth + 1);
    node.ground = node.ground && an.ground;
    shape = mix(shape, an.shape);
  }
  node.shape = sym.kind == SymbolKind::Variable ? kVariableShape : shape;
  args_.insert(args_.end(), args.begin(), args.end());
  const auto id = static_cast<TermId>(nodes_.size());
  nodes_.push_back(node);
  table_.emplace(h, id);
  return id;
}

TermId TermBank::variable(std::uint32_t index) {
  if (index < variables_.size() && variables_[index] != kNoTerm) return variables_[index];
  if (index >= variables_.size()) variables_.resize(index + 1, kNoTerm);
  const SymbolId s = registerSymbol("X" + std::to_string(index), SymbolKind::Variable, 0);
  const TermId t = intern(s, {});
  nodes_[t].varIndex = static_cast<std::int32_t>(index);
  variables_[index] = t;
  return t;
}

void TermBank::appendTo(TermId t, std::string& out) const {
  const Node& n = nodes_[t];
  if (n.arity == 2 && symbols_[n.head].name == "=") {
    appendTo(args_[n.argBegin], out);
    out += " = ";
    appendTo(args_[n.argBegin + 1], out);
    return;
  }
  out += symbols_[n.head].name;
  if (n.arity == 0) return;
  out += '(';
  for (std::uint32_t i = 0; i < n.arity; ++i) {
    if (i) out += ',';
    appendTo(args_[n.argBegin + i], out);
  }
  out += ')';
}

std::string TermBank::toString(TermId t) const {
  std::string out;
  appendTo(t, out);
  return out;
}

TermId TermBank::import(const TermBank& other, TermId t) {
  const Node& n = other.nodes_[t];
  if (n.varIndex >= 0) return variable(static_cast<std::uint32_t>(n.varIndex));
  const Symbol& s = other.symbols_[n.head];
  std::vector<TermId> args;
  args.reserve(n.arity);
  for (TermId a : other.args(t)) args.push_back(import(other, a));
  const SymbolId head = registerSymbol(s.name, s.kind, s.arity);
  return intern(head, args);
}

}  // namespace clauselab
