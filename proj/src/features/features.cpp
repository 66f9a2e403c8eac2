#include "clauselab/features.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace clauselab {

namespace {

constexpr std::string_view kindCode(FeatureKind k) {
  switch (k) {
    case FeatureKind::Vertical: return "v";
    case FeatureKind::Horizontal: return "h";
    case FeatureKind::SymbolCount: return "sc";
    case FeatureKind::SymbolMaxDepth: return "sd";
    case FeatureKind::Length: return "len";
    case FeatureKind::PositiveCount: return "pos";
    case FeatureKind::NegativeCount: return "neg";
  }
  return "?";
}

FeatureKind kindFromCode(std::string_view code) {
  for (auto k : {FeatureKind::Vertical, FeatureKind::Horizontal, FeatureKind::SymbolCount,
                 FeatureKind::SymbolMaxDepth, FeatureKind::Length, FeatureKind::PositiveCount,
                 FeatureKind::NegativeCount}) {
    if (kindCode(k) == code) return k;
  }
  throw std::invalid_argument("unknown feature kind '" + std::string(code) + "'");
}

void appendEscaped(std::string& out, std::string_view s) {
  for (char c : s) {
    if (c == '|' || c == '\\') out += '\\';
    out += c;
  }
}

std::string symbolToken(const TermBank& bank, SymbolId s) {
  const Symbol& sym = bank.symbol(s);
  switch (sym.kind) {
    case SymbolKind::Variable: return std::string(tokens::kVariable);
    case SymbolKind::Skolem: return tokens::skolem(sym.arity);
    default: return sym.name;
  }
}

// Walks a clause and reports every feature occurrence to `sink` as
// (kind, serialized key, value). Sum-type occurrences add up, max-type
// occurrences (symbol depth) combine by maximum.
template <class Sink>
class Walker {
 public:
  // Tokens are cached for every symbol up front so that views into them
  // stay valid during the walk.
  Walker(const TermBank& bank, Sink& sink) : bank_(bank), sink_(sink), tokens_(bank.symbolCount()) {}

  void clause(const Clause& c) {
    for (const Literal& l : c.literals) literal(l);
    const ClauseStats s = clauseStats(c);
    emit(FeatureKind::Length, {}, static_cast<std::int64_t>(s.length));
    emit(FeatureKind::PositiveCount, {}, static_cast<std::int64_t>(s.positiveCount));
    emit(FeatureKind::NegativeCount, {}, static_cast<std::int64_t>(s.negativeCount));
  }

 private:
  void literal(const Literal& lit) {
    const std::string& name = token(bank_.head(lit.atom));
    negated_ = lit.positive ? name : "~" + name;
    path_.clear();
    walk(lit.atom, 1, negated_, name);
  }

  const std::string& token(SymbolId s) {
    auto& slot = tokens_[s];
    if (!slot) slot = symbolToken(bank_, s);
    return *slot;
  }

  void walk(TermId t, std::uint32_t depth, std::string_view walkToken, std::string_view plainToken) {
    path_.push_back(walkToken);
    emit(FeatureKind::SymbolCount, {plainToken}, 1);
    emit(FeatureKind::SymbolMaxDepth, {plainToken}, depth);
    if (depth >= 3) emit(FeatureKind::Vertical, {path_[depth - 3], path_[depth - 2], path_[depth - 1]}, 1);

    const auto args = bank_.args(t);
    if (args.empty()) {
      if (depth == 1) emit(FeatureKind::Vertical, {path_[0], tokens::kBlank, tokens::kBlank}, 1);
      if (depth == 2) emit(FeatureKind::Vertical, {path_[0], path_[1], tokens::kBlank}, 1);
    } else {
      buf_.assign(kindCode(FeatureKind::Horizontal));
      buf_ += '|';
      appendEscaped(buf_, walkToken);
      for (TermId a : args) {
        buf_ += '|';
        appendEscaped(buf_, token(bank_.head(a)));
      }
      sink_(FeatureKind::Horizontal, buf_, 1);
      for (TermId a : args) {
        const std::string& tok = token(bank_.head(a));
        walk(a, depth + 1, tok, tok);
      }
    }
    path_.pop_back();
  }

  void emit(FeatureKind kind, std::initializer_list<std::string_view> payload, std::int64_t value) {
    buf_.assign(kindCode(kind));
    for (std::string_view p : payload) {
      buf_ += '|';
      appendEscaped(buf_, p);
    }
    sink_(kind, buf_, value);
  }

  const TermBank& bank_;
  Sink& sink_;
  std::vector<std::optional<std::string>> tokens_;
  std::string negated_;
  std::vector<std::string_view> path_;
  std::string buf_;
};

struct MultisetSink {
  std::map<std::string, FeatureEntry, std::less<>> acc;

  void operator()(FeatureKind kind, const std::string& text, std::int64_t value) {
    auto it = acc.find(text);
    if (it == acc.end()) it = acc.emplace(text, FeatureEntry{FeatureKey::parse(text), text, 0}).first;
    FeatureEntry& e = it->second;
    e.value = isMaxType(kind) ? std::max(e.value, value) : e.value + value;
  }
};

}  // namespace

std::string tokens::skolem(std::uint32_t arity) { return "$sk" + std::to_string(arity); }

std::string FeatureKey::serialize() const {
  std::string out;
  if (conjectureSide) out += "c|";
  out += kindCode(kind);
  for (const std::string& p : payload) {
    out += '|';
    appendEscaped(out, p);
  }
  return out;
}

FeatureKey FeatureKey::parse(std::string_view text) {
  std::vector<std::string> parts(1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      parts.back() += text[++i];
    } else if (text[i] == '|') {
      parts.emplace_back();
    } else {
      parts.back() += text[i];
    }
  }
  FeatureKey key;
  std::size_t first = 0;
  if (parts.size() > 1 && parts[0] == "c") {
    key.conjectureSide = true;
    first = 1;
  }
  key.kind = kindFromCode(parts[first]);
  key.payload.assign(parts.begin() + static_cast<std::ptrdiff_t>(first) + 1, parts.end());
  return key;
}

FeatureMultiset extractClauseFeatures(const TermBank& bank, const Clause& c) {
  MultisetSink sink;
  Walker<MultisetSink>(bank, sink).clause(c);
  FeatureMultiset out;
  out.reserve(sink.acc.size());
  for (auto& [text, entry] : sink.acc) {
    if (entry.value != 0) out.push_back(std::move(entry));
  }
  return out;
}

FeatureMultiset extractConjectureFeatures(const TermBank& bank, std::span<const Clause> conjecture) {
  std::map<std::string, FeatureEntry> merged;
  for (const Clause& c : conjecture) {
    for (FeatureEntry& e : extractClauseFeatures(bank, c)) {
      auto it = merged.find(e.text);
      if (it == merged.end()) {
        merged.emplace(e.text, std::move(e));
      } else if (isMaxType(e.key.kind)) {
        it->second.value = std::max(it->second.value, e.value);
      } else {
        it->second.value += e.value;
      }
    }
  }
  FeatureMultiset out;
  out.reserve(merged.size());
  for (auto& [text, e] : merged) out.push_back(std::move(e));
  return out;
}

std::int64_t FeatureVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const auto& e, std::uint32_t i) { return e.first < i; });
  return it != entries.end() && it->first == index ? it->second : 0;
}

FeatureSpace FeatureSpace::indexed() { return FeatureSpace{}; }

FeatureSpace FeatureSpace::hashed(std::uint64_t base) {
  HashConfig cfg(base);  // validates
  FeatureSpace s;
  s.hashBase_ = cfg.base;
  s.frozen_ = true;
  return s;
}

std::uint32_t FeatureSpace::add(std::string_view key) {
  if (isHashed()) throw std::logic_error("cannot add keys to a hashed feature space");
  if (auto i = indexOf(key)) return *i;
  if (frozen_) throw std::logic_error("feature space is frozen");
  const auto id = static_cast<std::uint32_t>(keys_.size());
  keys_.emplace_back(key);
  index_.emplace(keys_.back(), id);
  return id;
}

std::optional<std::uint32_t> FeatureSpace::indexOf(std::string_view key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t FeatureSpace::halfDimension() const {
  return isHashed() ? static_cast<std::uint32_t>(hashBase_) : static_cast<std::uint32_t>(keys_.size() + 1);
}

std::uint32_t FeatureSpace::overflowIndex() const {
  if (isHashed()) throw std::logic_error("hashed spaces have no overflow slot");
  return static_cast<std::uint32_t>(keys_.size());
}

std::uint32_t FeatureSpace::slot(std::string_view key) const {
  if (isHashed()) return HashConfig(hashBase_).bucket(key);
  if (auto i = indexOf(key)) return *i;
  return overflowIndex();
}

std::string FeatureSpace::describe(std::uint32_t index) const {
  const std::uint32_t half = halfDimension();
  const bool conj = index >= half;
  const std::uint32_t local = conj ? index - half : index;
  std::string prefix = conj ? "c|" : "";
  if (isHashed()) return prefix + "bucket|" + std::to_string(local);
  if (local == overflowIndex()) return prefix + "overflow";
  return prefix + keys_.at(local);
}

namespace {

struct Slot {
  std::int64_t sum = 0;
  std::int64_t max = 0;
  bool hasMax = false;
};

void accumulate(std::map<std::uint32_t, Slot>& slots, const FeatureMultiset& features,
                const FeatureSpace& space, std::uint32_t offset) {
  for (const FeatureEntry& e : features) {
    Slot& s = slots[space.slot(e.text) + offset];
    if (isMaxType(e.key.kind)) {
      s.max = s.hasMax ? std::max(s.max, e.value) : e.value;
      s.hasMax = true;
    } else {
      s.sum += e.value;
    }
  }
}

}  // namespace

FeatureVector vectorize(const FeatureMultiset& clause, const FeatureMultiset& conjecture,
                        const FeatureSpace& space) {
  std::map<std::uint32_t, Slot> slots;
  accumulate(slots, clause, space, 0);
  accumulate(slots, conjecture, space, space.halfDimension());
  FeatureVector v;
  v.dimension = space.vectorDimension();
  v.entries.reserve(slots.size());
  for (const auto& [index, s] : slots) {
    const std::int64_t value = s.sum + (s.hasMax ? s.max : 0);
    if (value != 0) v.entries.emplace_back(index, value);
  }
  return v;
}

FeatureVector vectorize(const TermBank& bank, const Clause& c, std::span<const Clause> conjecture,
                        const FeatureSpace& space) {
  return vectorize(extractClauseFeatures(bank, c), extractConjectureFeatures(bank, conjecture), space);
}

FeatureSpace buildSpace(std::span<const TrainingExample> examples) {
  if (examples.empty()) throw std::invalid_argument("cannot build a feature space from no examples");
  FeatureSpace space = FeatureSpace::indexed();
  for (const TrainingExample& ex : examples) {
    for (const FeatureEntry& e : extractClauseFeatures(*ex.bank, ex.clause)) space.add(e.text);
    for (const Clause& c : ex.conjecture) {
      for (const FeatureEntry& e : extractClauseFeatures(*ex.bank, c)) space.add(e.text);
    }
  }
  space.freeze();
  return space;
}

std::uint32_t hashKey(const FeatureKey& key, const HashConfig& cfg) {
  FeatureKey clauseSide = key;
  clauseSide.conjectureSide = false;
  return cfg.bucket(clauseSide.serialize());
}

CollisionReport collisionReport(const FeatureSpace& space, const HashConfig& cfg) {
  if (space.isHashed()) throw std::invalid_argument("collision report needs an indexed space");
  return collisionReport(std::span<const std::string>(space.keys()), cfg);
}

LabeledVectors vectorizeExamples(std::span<const TrainingExample> examples, const FeatureSpace& space) {
  LabeledVectors out;
  out.dimension = space.vectorDimension();
  out.rows.reserve(examples.size());
  out.labels.reserve(examples.size());
  const TermBank* lastBank = nullptr;
  const std::vector<Clause>* lastConj = nullptr;
  std::vector<ClauseId> lastConjIds;
  FeatureMultiset conj;
  for (const TrainingExample& ex : examples) {
    std::vector<ClauseId> ids;
    for (const Clause& c : ex.conjecture) ids.push_back(c.id);
    if (ex.bank.get() != lastBank || ids != lastConjIds || lastConj == nullptr) {
      conj = extractConjectureFeatures(*ex.bank, ex.conjecture);
      lastBank = ex.bank.get();
      lastConj = &ex.conjecture;
      lastConjIds = std::move(ids);
    }
    out.rows.push_back(vectorize(extractClauseFeatures(*ex.bank, ex.clause), conj, space));
    out.labels.push_back(ex.positive);
  }
  return out;
}

namespace {

struct SlotSink {
  struct Hit {
    std::uint32_t slot;
    bool max;
    std::int64_t value;
  };

  const FeatureSpace& space;
  std::vector<Hit> hits;

  void operator()(FeatureKind kind, const std::string& text, std::int64_t value) {
    hits.push_back({space.slot(text), isMaxType(kind), value});
  }
};

}  // namespace

BoundVectorizer::BoundVectorizer(const FeatureSpace& space, const TermBank& bank, std::span<const Clause> conjecture)
    : space_(space), bank_(bank), conjectureHalf_(vectorize({}, extractConjectureFeatures(bank, conjecture), space).entries) {}

FeatureVector BoundVectorizer::operator()(const Clause& c) const {
  SlotSink sink{space_, {}};
  Walker<SlotSink>(bank_, sink).clause(c);
  std::sort(sink.hits.begin(), sink.hits.end(), [](const auto& a, const auto& b) { return a.slot < b.slot; });
  FeatureVector v;
  v.dimension = space_.vectorDimension();
  v.entries.reserve(sink.hits.size() + conjectureHalf_.size());
  for (std::size_t i = 0; i < sink.hits.size();) {
    const std::uint32_t slot = sink.hits[i].slot;
    std::int64_t sum = 0;
    std::int64_t max = 0;
    for (; i < sink.hits.size() && sink.hits[i].slot == slot; ++i) {
      if (sink.hits[i].max) {
        max = std::max(max, sink.hits[i].value);
      } else {
        sum += sink.hits[i].value;
      }
    }
    if (sum + max != 0) v.entries.emplace_back(slot, sum + max);
  }
  v.entries.insert(v.entries.end(), conjectureHalf_.begin(), conjectureHalf_.end());
  return v;
}

void writeSpace(std::ostream& out, const FeatureSpace& space) {
  if (space.isHashed()) {
    out << "space hashed " << space.hashBase() << '\n';
    return;
  }
  out << "space indexed " << space.keyCount() << '\n';
  for (const std::string& k : space.keys()) out << k << '\n';
}

FeatureSpace readSpace(std::istream& in) {
  std::string word, mode;
  std::uint64_t n = 0;
  if (!(in >> word >> mode >> n) || word != "space") throw std::runtime_error("expected feature space header");
  if (mode == "hashed") return FeatureSpace::hashed(n);
  if (mode != "indexed") throw std::runtime_error("unknown feature space mode '" + mode + "'");
  FeatureSpace space = FeatureSpace::indexed();
  std::string line;
  std::getline(in, line);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated feature space");
    space.add(line);
  }
  space.freeze();
  return space;
}

}  // namespace clauselab
