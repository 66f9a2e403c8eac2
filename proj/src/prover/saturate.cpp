#include <algorithm>
#include <chrono>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "clauselab/inference.hpp"
#include "clauselab/prover.hpp"

namespace clauselab {

std::string toString(RunStatus s) {
  switch (s) {
    case RunStatus::Proved: return "proved";
    case RunStatus::Saturated: return "saturated";
    case RunStatus::ResourceOut: return "resourceOut";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t x : v) h = (h ^ x) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h);
  }
};

std::uint64_t literalKey(const TermBank& bank, const Literal& l) {
  return static_cast<std::uint64_t>(bank.head(l.atom)) * 2u + (l.positive ? 1u : 0u);
}

std::vector<std::uint64_t> clauseKey(const Clause& c) {
  std::vector<std::uint64_t> key;
  key.reserve(c.literals.size());
  for (const Literal& l : c.literals) key.push_back(static_cast<std::uint64_t>(l.atom) * 2u + (l.positive ? 1u : 0u));
  return key;
}

enum class State : std::uint8_t { Unused, Unprocessed, Processed, Discarded };

class Saturator {
 public:
  Saturator(const Problem& problem, const Strategy& strategy, const Limits& limits)
      : bank_(std::make_shared<TermBank>(*problem.bank)),
        problem_(problem),
        limits_(limits),
        scheduler_([&] {
          std::vector<std::uint32_t> f;
          for (const QueueSpec& q : strategy.queues) f.push_back(q.frequency);
          return f;
        }()),
        queues_(strategy.queues.size()),
        start_(Clock::now()) {
    for (const QueueSpec& q : strategy.queues) weighers_.push_back(q.weight.bind(*bank_, problem.conjecture));
  }

  RunReport run(const SaturateOptions& options) {
    report_.problemName = problem_.name;
    report_.status = loop();
    report_.wallSeconds = std::chrono::duration<double>(Clock::now() - start_).count();
    if (report_.status == RunStatus::Proved) collectProof();
    if (options.keepTrace) {
      auto trace = std::make_shared<ProofTrace>();
      trace->bank = bank_;
      trace->clauses = std::move(store_);
      report_.trace = std::move(trace);
    }
    return std::move(report_);
  }

 private:
  RunStatus loop() {
    std::vector<const Clause*> inputs;
    for (const Clause& c : problem_.axioms) inputs.push_back(&c);
    for (const Clause& c : problem_.conjecture) inputs.push_back(&c);
    std::sort(inputs.begin(), inputs.end(), [](const Clause* a, const Clause* b) { return a->id < b->id; });
    for (const Clause* c : inputs) {
      if (c->empty()) {
        store(*c, State::Processed);
        emptyClause_ = c->id;
        return RunStatus::Proved;
      }
      if (isTautology(c->literals)) continue;
      if (!seen_.insert(clauseKey(*c)).second) continue;
      enqueue(store(*c, State::Unprocessed));
    }

    while (true) {
      if (report_.processedCount >= limits_.maxProcessed || outOfTime()) return RunStatus::ResourceOut;
      const auto given = selectGiven();
      if (!given) return RunStatus::Saturated;
      if (forwardSubsumed(store_[*given])) {
        states_[*given] = State::Discarded;
        continue;
      }
      process(*given);
      if (const auto status = generate(*given)) return *status;
    }
  }

  bool outOfTime() const {
    return limits_.maxSeconds > 0 &&
           std::chrono::duration<double>(Clock::now() - start_).count() > limits_.maxSeconds;
  }

  ClauseId store(const Clause& c, State state) {
    if (c.id >= store_.size()) {
      store_.resize(c.id + 1);
      states_.resize(c.id + 1, State::Unused);
    }
    store_[c.id] = c;
    states_[c.id] = state;
    return c.id;
  }

  void enqueue(ClauseId id) {
    const Clause& c = store_[id];
    for (std::size_t q = 0; q < queues_.size(); ++q) queues_[q].emplace(weighers_[q]->weight(c), id);
  }

  std::optional<ClauseId> selectGiven() {
    auto nonEmpty = [&](std::size_t q) {
      auto& heap = queues_[q];
      while (!heap.empty() && states_[heap.top().second] != State::Unprocessed) heap.pop();
      return !heap.empty();
    };
    const auto q = scheduler_.next(nonEmpty);
    if (!q) return std::nullopt;
    const ClauseId id = queues_[*q].top().second;
    queues_[*q].pop();
    return id;
  }

  bool forwardSubsumed(const Clause& c) const {
    const std::uint64_t sig = literalSignature(*bank_, c.literals);
    for (ClauseId pid : processed_) {
      const Clause& p = store_[pid];
      if (p.literals.size() > c.literals.size() || (signatures_[pid] & ~sig) != 0) continue;
      if (subsumes(*bank_, p, c)) return true;
    }
    return false;
  }

  bool unitSubsumed(const Clause& c) {
    for (const Literal& l : c.literals) {
      auto it = units_.find(literalKey(*bank_, l));
      if (it == units_.end()) continue;
      for (ClauseId uid : it->second) {
        matchBindings_.clear();
        matchTrail_.clear();
        if (matchTerm(*bank_, store_[uid].literals[0].atom, l.atom, matchBindings_, matchTrail_)) return true;
      }
    }
    return false;
  }

  void process(ClauseId id) {
    states_[id] = State::Processed;
    ++report_.processedCount;
    report_.selected.push_back(id);
    if (signatures_.size() <= id) signatures_.resize(id + 1, 0);
    const Clause& c = store_[id];
    signatures_[id] = literalSignature(*bank_, c.literals);
    if (positionOf_.size() <= id) positionOf_.resize(id + 1, 0);
    positionOf_[id] = processed_.size();
    processed_.push_back(id);
    std::unordered_set<std::uint64_t> keys;
    for (const Literal& l : c.literals) keys.insert(literalKey(*bank_, l));
    for (std::uint64_t k : keys) byLiteral_[k].push_back(id);
    if (c.literals.size() == 1) units_[literalKey(*bank_, c.literals[0])].push_back(id);
  }

  std::optional<RunStatus> generate(ClauseId givenId) {
    const Clause given = store_[givenId];
    if (auto s = admit(factors(*bank_, given))) return s;

    std::vector<ClauseId> partners;
    for (const Literal& l : given.literals) {
      const std::uint64_t complement = literalKey(*bank_, l) ^ 1u;
      if (auto it = byLiteral_.find(complement); it != byLiteral_.end()) {
        partners.insert(partners.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(partners.begin(), partners.end(),
              [&](ClauseId a, ClauseId b) { return positionOf_[a] < positionOf_[b]; });
    partners.erase(std::unique(partners.begin(), partners.end()), partners.end());
    for (ClauseId pid : partners) {
      if (auto s = admit(resolvents(*bank_, given, store_[pid]))) return s;
    }
    return std::nullopt;
  }

  std::optional<RunStatus> admit(std::vector<Clause> fresh) {
    for (Clause& c : fresh) {
      ++report_.generatedCount;
      if (c.empty()) {
        c.id = bank_->nextClauseId();
        emptyClause_ = store(c, State::Processed);
        return RunStatus::Proved;
      }
      if (limits_.maxGenerated > 0 && report_.generatedCount >= limits_.maxGenerated) {
        return RunStatus::ResourceOut;
      }
      if ((report_.generatedCount & 255u) == 0 && outOfTime()) return RunStatus::ResourceOut;
      if (!seen_.insert(clauseKey(c)).second) continue;
      if (unitSubsumed(c)) continue;
      c.id = bank_->nextClauseId();
      enqueue(store(c, State::Unprocessed));
    }
    return std::nullopt;
  }

  void collectProof() {
    std::vector<ClauseId> todo{emptyClause_};
    std::unordered_set<ClauseId> seen{emptyClause_};
    while (!todo.empty()) {
      const ClauseId id = todo.back();
      todo.pop_back();
      for (ClauseId p : store_[id].inference.parents) {
        if (seen.insert(p).second) todo.push_back(p);
      }
    }
    report_.proofClauses.assign(seen.begin(), seen.end());
    std::sort(report_.proofClauses.begin(), report_.proofClauses.end());
  }

  using Entry = std::pair<double, ClauseId>;
  using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

  std::shared_ptr<TermBank> bank_;
  const Problem& problem_;
  Limits limits_;
  QueueScheduler scheduler_;
  std::vector<std::unique_ptr<ClauseWeigher>> weighers_;
  std::vector<MinHeap> queues_;
  Clock::time_point start_;

  std::vector<Clause> store_;
  std::vector<State> states_;
  std::vector<std::uint64_t> signatures_;
  std::vector<std::size_t> positionOf_;
  std::vector<ClauseId> processed_;
  std::unordered_map<std::uint64_t, std::vector<ClauseId>> byLiteral_;
  std::unordered_map<std::uint64_t, std::vector<ClauseId>> units_;
  std::unordered_set<std::vector<std::uint64_t>, VectorHash> seen_;
  std::vector<TermId> matchBindings_;
  std::vector<std::int32_t> matchTrail_;
  ClauseId emptyClause_ = 0;
  RunReport report_;
};

}  // namespace

RunReport saturate(const Problem& problem, const Strategy& strategy, const Limits& limits,
                   const SaturateOptions& options) {
  strategy.validate();
  if (!problem.bank) throw std::invalid_argument("problem has no term bank");
  Saturator s(problem, strategy, limits);
  return s.run(options);
}

std::vector<TrainingExample> extractExamples(const RunReport& report, const Problem& problem) {
  if (report.status != RunStatus::Proved) {
    throw std::logic_error("examples can only be extracted from proved runs");
  }
  if (!report.trace) throw std::logic_error("run report carries no trace");
  const TermBank& src = *report.trace->bank;
  auto bank = std::make_shared<TermBank>();
  bank->setSkolemPrefixes(src.skolemPrefixes());
  auto copy = [&](const Clause& c) {
    Clause out = c;
    for (Literal& l : out.literals) l.atom = bank->import(src, l.atom);
    return out;
  };
  std::vector<Clause> conjecture;
  for (const Clause& c : problem.conjecture) conjecture.push_back(copy(c));

  std::vector<TrainingExample> out;
  out.reserve(report.selected.size());
  for (ClauseId id : report.selected) {
    TrainingExample ex;
    ex.bank = bank;
    ex.clause = copy(report.trace->at(id));
    ex.conjecture = conjecture;
    ex.positive = std::binary_search(report.proofClauses.begin(), report.proofClauses.end(), id);
    ex.problemName = problem.name;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace clauselab
