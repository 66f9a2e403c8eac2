#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "clauselab/neural_model.hpp"
#include "kernels.hpp"

namespace clauselab {

namespace {

std::string conjectureKey(const TrainingExample& e) {
  std::ostringstream key;
  key << static_cast<const void*>(e.bank.get());
  for (const Clause& c : e.conjecture) key << '\n' << toString(*e.bank, c);
  return key.str();
}

void countSymbols(const TermBank& bank, const Clause& c, std::unordered_map<std::string, std::uint64_t>& out) {
  std::vector<TermId> stack;
  for (const Literal& l : c.literals) stack.push_back(l.atom);
  while (!stack.empty()) {
    const TermId t = stack.back();
    stack.pop_back();
    const Symbol& s = bank.symbol(bank.head(t));
    if (s.kind == SymbolKind::Function || s.kind == SymbolKind::Predicate) {
      ++out[std::string(s.kind == SymbolKind::Predicate ? "p" : "f") + "/" + std::to_string(s.arity) + "/" + s.name];
    }
    for (TermId a : bank.args(t)) stack.push_back(a);
  }
}

// One tape over a batch; terms are memoized per bank and conjecture
// summaries per distinct conjecture.
double batchLoss(NeuralModel& model, std::span<const TrainingExample* const> batch, double positiveWeight,
                 bool accumulate) {
  ad::Tape tape;
  detail::TapeOps ops{tape, model.parameters()};
  using Node = ad::Tape::Node;
  std::map<std::pair<const TermBank*, TermId>, Node> termMemo;
  std::map<const TermBank*, std::unordered_map<SymbolId, std::uint32_t>> blockMemo;
  std::map<std::string, Node> summaries;

  auto embedTerm = [&](auto& self, const TermBank& bank, TermId t) -> Node {
    if (auto it = termMemo.find({&bank, t}); it != termMemo.end()) return it->second;
    auto& blocks = blockMemo[&bank];
    const SymbolId head = bank.head(t);
    auto bit = blocks.find(head);
    if (bit == blocks.end()) bit = blocks.emplace(head, model.blockFor(bank.symbol(head))).first;
    std::vector<Node> args;
    for (TermId a : bank.args(t)) args.push_back(self(self, bank, a));
    const Node v = detail::applySymbol(ops, model, bit->second, std::span<const Node>(args));
    termMemo.emplace(std::make_pair(&bank, t), v);
    return v;
  };
  auto embedClause = [&](const TermBank& bank, const Clause& c) -> Node {
    std::vector<Node> seq;
    for (const Literal& l : c.literals) {
      Node v = embedTerm(embedTerm, bank, l.atom);
      if (!l.positive) {
        const std::array<Node, 1> arg{v};
        v = detail::applySymbol(ops, model, model.negationBlock(), std::span<const Node>(arg));
      }
      seq.push_back(v);
    }
    return detail::runLstm(ops, model.clauseCombiner(), std::span<const Node>(seq));
  };

  std::vector<Node> losses;
  double totalWeight = 0;
  for (const TrainingExample* e : batch) {
    const std::string key = conjectureKey(*e);
    auto sit = summaries.find(key);
    if (sit == summaries.end()) {
      std::vector<Node> seq;
      for (const Clause& c : e->conjecture) seq.push_back(embedClause(*e->bank, c));
      sit = summaries.emplace(key, detail::runLstm(ops, model.conjectureCombiner(), std::span<const Node>(seq))).first;
    }
    const Node logits = detail::runFin(ops, model.fin(), embedClause(*e->bank, e->clause), sit->second);
    const double w = e->positive ? positiveWeight : 1.0;
    losses.push_back(tape.weightedNll(logits, e->positive ? 1 : 0, w));
    totalWeight += w;
  }
  if (losses.empty()) return 0;
  const Node root = tape.sumScaled(losses, 1.0 / totalWeight);
  const double loss = tape.value(root)[0];
  if (accumulate && std::isfinite(loss)) tape.backward(root);
  return loss;
}

struct Adam {
  explicit Adam(double rate) : lr(rate) {}

  double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<ad::Matrix> first, second;

  void apply(std::vector<ad::Parameter>& params) {
    if (first.empty()) {
      for (const ad::Parameter& p : params) {
        first.push_back(ad::Matrix::Zero(p.value.rows(), p.value.cols()));
        second.push_back(ad::Matrix::Zero(p.value.rows(), p.value.cols()));
      }
    }
    ++step;
    const double c1 = 1.0 - std::pow(beta1, double(step));
    const double c2 = 1.0 - std::pow(beta2, double(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
      ad::Parameter& p = params[i];
      first[i] = beta1 * first[i] + (1 - beta1) * p.grad;
      second[i] = beta2 * second[i] + (1 - beta2) * p.grad.cwiseProduct(p.grad);
      p.value.array() -= lr * (first[i].array() / c1) / ((second[i].array() / c2).sqrt() + eps);
    }
  }
};

}  // namespace

std::unordered_map<std::string, std::uint64_t> symbolFrequencies(std::span<const TrainingExample> examples) {
  std::unordered_map<std::string, std::uint64_t> out;
  std::unordered_map<std::string, bool> seenConjectures;
  for (const TrainingExample& e : examples) {
    countSymbols(*e.bank, e.clause, out);
    if (seenConjectures.emplace(conjectureKey(e), true).second) {
      for (const Clause& c : e.conjecture) countSymbols(*e.bank, c, out);
    }
  }
  return out;
}

double neuralLoss(NeuralModel& model, std::span<const TrainingExample> examples, double positiveWeight,
                  bool accumulate) {
  std::vector<const TrainingExample*> batch;
  for (const TrainingExample& e : examples) batch.push_back(&e);
  return batchLoss(model, batch, positiveWeight, accumulate);
}

std::shared_ptr<NeuralModel> trainNeural(std::span<const TrainingExample> examples, const NeuralConfig& config) {
  config.validate();
  if (examples.empty()) throw std::invalid_argument("no training examples");
  const auto positives = static_cast<std::size_t>(
      std::count_if(examples.begin(), examples.end(), [](const TrainingExample& e) { return e.positive; }));
  const std::size_t negatives = examples.size() - positives;
  if (positives == 0 || negatives == 0) throw std::invalid_argument("neural training needs both labels");
  const double positiveWeight =
      config.positiveClassWeight > 0 ? config.positiveClassWeight : double(negatives) / double(positives);

  std::vector<std::string> keys;
  for (const auto& [key, count] : symbolFrequencies(examples)) {
    if (count >= config.rareThreshold) keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  auto model = std::make_shared<NeuralModel>(config, keys);

  // Examples sharing a conjecture stay together so each batch computes few
  // conjecture summaries.
  std::vector<std::vector<const TrainingExample*>> groups;
  std::unordered_map<std::string, std::size_t> groupOf;
  for (const TrainingExample& e : examples) {
    auto [it, fresh] = groupOf.emplace(conjectureKey(e), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(&e);
  }

  std::mt19937_64 rng(config.seed);
  Adam adam(config.learningRate);
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::vector<const TrainingExample*>> batches;
    for (auto& g : groups) {
      std::shuffle(g.begin(), g.end(), rng);
      for (std::size_t i = 0; i < g.size(); i += config.batchSize) {
        batches.emplace_back(g.begin() + static_cast<std::ptrdiff_t>(i),
                             g.begin() + static_cast<std::ptrdiff_t>(std::min(g.size(), i + config.batchSize)));
      }
    }
    std::shuffle(batches.begin(), batches.end(), rng);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      for (ad::Parameter& p : model->parameters()) p.zeroGrad();
      const double loss = batchLoss(*model, batches[b], positiveWeight, true);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("neural training diverged: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(b) + " of " + std::to_string(batches.size()));
      }
      adam.apply(model->parameters());
    }
    model->lossHistory.push_back(neuralLoss(*model, examples, positiveWeight, false));
  }
  for (ad::Parameter& p : model->parameters()) p.zeroGrad();
  return model;
}

}  // namespace clauselab
