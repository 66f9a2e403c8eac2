#include "clauselab/neural_model.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "kernels.hpp"

namespace clauselab {

namespace {

constexpr std::string_view kHeader = "clauselab-neural";
constexpr int kFormatVersion = 1;

std::string kindCode(SymbolKind k) { return k == SymbolKind::Predicate ? "p" : "f"; }

class NeuralWeigher final : public ClauseWeigher {
 public:
  NeuralWeigher(const NeuralModel& model, const TermBank& bank, std::span<const Clause> conjecture)
      : model_(model), eval_(model, bank), summary_(eval_.conjectureSummary(conjecture)) {}

  double weight(const Clause& c) override {
    const Eigen::Vector2d x = eval_.logits(c, summary_);
    if (model_.config().probabilityOrdering) return 1.0 + 9.0 * (1.0 - neuralProbability(x));
    return neuralWeight(x);
  }

 private:
  const NeuralModel& model_;
  NeuralEvaluator eval_;
  ad::Vector summary_;
};

}  // namespace

void NeuralConfig::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("embedding sizes must be positive");
  if (m > n) throw std::invalid_argument("conjecture summary size must not exceed the embedding size");
  if (batchSize < 1) throw std::invalid_argument("batch size must be positive");
  if (!(learningRate > 0)) throw std::invalid_argument("learning rate must be positive");
}

NeuralModel::NeuralModel(NeuralConfig config, const std::vector<std::string>& symbolKeys) : config_(config) {
  config_.validate();
  build(symbolKeys);
  initialize();
}

std::size_t NeuralModel::addParam(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  params_.emplace_back(name, ad::Matrix::Zero(rows, cols));
  return params_.size() - 1;
}

std::uint32_t NeuralModel::addBlock(const std::string& key, std::uint32_t arity) {
  if (keys_.contains(key)) throw std::invalid_argument("duplicate symbol block '" + key + "'");
  const Eigen::Index n = config_.n;
  SymbolBlock b;
  b.arity = arity;
  if (arity == 0) {
    b.weight = addParam("sym:" + key, n, 1);
  } else {
    b.weight = addParam("sym:" + key + ":w", n, n * arity);
    b.bias = addParam("sym:" + key + ":b", n, 1);
  }
  blocks_.push_back(b);
  const auto id = static_cast<std::uint32_t>(blocks_.size() - 1);
  keys_.emplace(key, id);
  return id;
}

LstmParams NeuralModel::addLstm(const std::string& name, std::uint32_t input, std::uint32_t hidden, std::uint32_t out) {
  LstmParams l;
  l.hidden = hidden;
  l.gates = addParam(name + ":gates", 4 * Eigen::Index(hidden), Eigen::Index(input) + hidden);
  l.gateBias = addParam(name + ":gates_b", 4 * Eigen::Index(hidden), 1);
  l.projection = addParam(name + ":proj", out, hidden);
  l.projectionBias = addParam(name + ":proj_b", out, 1);
  return l;
}

void NeuralModel::build(const std::vector<std::string>& symbolKeys) {
  variable_ = addBlock("var", 0);
  negation_ = addBlock("neg", 1);
  for (std::uint32_t a = 0; a <= config_.maxSharedArity; ++a) addBlock("sk/" + std::to_string(a), a);
  for (const char* kind : {"f", "p"}) {
    for (std::uint32_t a = 0; a <= config_.maxSharedArity; ++a) {
      addBlock("rare/" + std::string(kind) + "/" + std::to_string(a), a);
    }
  }
  for (const std::string& key : symbolKeys) {
    const auto first = key.find('/');
    const auto second = key.find('/', first + 1);
    if (first == std::string::npos || second == std::string::npos || (key[0] != 'f' && key[0] != 'p') || first != 1) {
      throw std::invalid_argument("malformed symbol key '" + key + "'");
    }
    addBlock(key, static_cast<std::uint32_t>(std::stoul(key.substr(first + 1, second - first - 1))));
  }
  const std::uint32_t n = config_.n, m = config_.m;
  clause_ = addLstm("cl", n, n, n);
  conjecture_ = addLstm("conj", n, n, m);
  const std::uint32_t wide = n + m, half = std::max(1u, n / 2);
  fin_.w1 = addParam("fin:w1", wide, wide);
  fin_.b1 = addParam("fin:b1", wide, 1);
  fin_.w2 = addParam("fin:w2", half, wide);
  fin_.b2 = addParam("fin:b2", half, 1);
  fin_.w3 = addParam("fin:w3", 2, half);
  fin_.b3 = addParam("fin:b3", 2, 1);
}

void NeuralModel::initialize() {
  std::mt19937_64 rng(config_.seed);
  const double r = 1.0 / std::sqrt(double(config_.n));
  std::uniform_real_distribution<double> u(-r, r);
  for (ad::Parameter& p : params_) {
    for (Eigen::Index j = 0; j < p.value.cols(); ++j) {
      for (Eigen::Index i = 0; i < p.value.rows(); ++i) p.value(i, j) = u(rng);
    }
    p.zeroGrad();
  }
}

std::uint32_t NeuralModel::blockFor(const Symbol& s) const {
  std::string key;
  switch (s.kind) {
    case SymbolKind::Variable: return variable_;
    case SymbolKind::Skolem: key = "sk/" + std::to_string(s.arity); break;
    default: {
      const std::string own = kindCode(s.kind) + "/" + std::to_string(s.arity) + "/" + s.name;
      if (auto it = keys_.find(own); it != keys_.end()) return it->second;
      key = "rare/" + kindCode(s.kind) + "/" + std::to_string(s.arity);
    }
  }
  auto it = keys_.find(key);
  if (it == keys_.end()) {
    throw std::out_of_range("no parameter block for symbol '" + s.name + "' of arity " + std::to_string(s.arity));
  }
  return it->second;
}

std::size_t NeuralModel::parameterCount() const {
  std::size_t total = 0;
  for (const ad::Parameter& p : params_) total += static_cast<std::size_t>(p.value.size());
  return total;
}

std::unique_ptr<ClauseWeigher> NeuralModel::bind(const TermBank& bank, std::span<const Clause> conjecture) const {
  return std::make_unique<NeuralWeigher>(*this, bank, conjecture);
}

void NeuralModel::save(std::ostream& out) const {
  out << kHeader << ' ' << kFormatVersion << '\n';
  out << "config " << config_.n << ' ' << config_.m << ' ' << config_.rareThreshold << ' '
      << (config_.nonlinearity == Nonlinearity::Tanh ? "tanh" : "relu6") << ' ' << config_.maxSharedArity << ' '
      << (config_.probabilityOrdering ? 1 : 0) << '\n';
  std::vector<std::string> own;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    for (const auto& [key, id] : keys_) {
      if (id == i && (key[0] == 'f' || key[0] == 'p') && key[1] == '/') own.push_back(key);
    }
  }
  out << "symbols " << own.size() << '\n';
  for (const std::string& k : own) out << k << '\n';
  out << "params " << params_.size() << '\n' << std::setprecision(17);
  for (const ad::Parameter& p : params_) {
    out << p.name << ' ' << p.value.rows() << ' ' << p.value.cols() << '\n';
    for (Eigen::Index j = 0; j < p.value.cols(); ++j) {
      for (Eigen::Index i = 0; i < p.value.rows(); ++i) out << (i || j ? " " : "") << p.value(i, j);
    }
    out << '\n';
  }
}

std::shared_ptr<NeuralModel> NeuralModel::load(std::istream& in) {
  std::string word, nl;
  int version = 0, ordering = 0;
  if (!(in >> word >> version) || word != kHeader) throw std::runtime_error("not a neural model file");
  if (version != kFormatVersion) throw std::runtime_error("unsupported neural model version " + std::to_string(version));
  NeuralConfig c;
  if (!(in >> word >> c.n >> c.m >> c.rareThreshold >> nl >> c.maxSharedArity >> ordering) || word != "config") {
    throw std::runtime_error("expected config");
  }
  if (nl != "relu6" && nl != "tanh") throw std::runtime_error("unknown nonlinearity '" + nl + "'");
  c.nonlinearity = nl == "tanh" ? Nonlinearity::Tanh : Nonlinearity::Relu6;
  c.probabilityOrdering = ordering != 0;
  c.validate();
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "symbols") throw std::runtime_error("expected symbols");
  std::vector<std::string> keys(count);
  for (std::string& k : keys) {
    if (!(in >> k)) throw std::runtime_error("truncated symbol table");
  }
  std::shared_ptr<NeuralModel> model(new NeuralModel());
  model->config_ = c;
  model->build(keys);
  if (!(in >> word >> count) || word != "params" || count != model->params_.size()) {
    throw std::runtime_error("parameter table does not match the architecture");
  }
  for (ad::Parameter& p : model->params_) {
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> word >> rows >> cols) || word != p.name || rows != p.value.rows() || cols != p.value.cols()) {
      throw std::runtime_error("unexpected parameter '" + word + "', wanted '" + p.name + "'");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!(in >> p.value(i, j))) throw std::runtime_error("truncated parameter '" + p.name + "'");
      }
    }
  }
  return model;
}

NeuralEvaluator::NeuralEvaluator(const NeuralModel& model, const TermBank& bank, bool useCache)
    : model_(model), bank_(bank), useCache_(useCache) {}

ad::Vector NeuralEvaluator::applyBlock(std::uint32_t block, std::span<const ad::Vector> args) {
  ++applications_;
  detail::ValueOps ops{model_.parameters()};
  return detail::applySymbol(ops, model_, block, args);
}

ad::Vector NeuralEvaluator::embedTerm(TermId t) {
  if (useCache_) {
    if (auto it = terms_.find(t); it != terms_.end()) return it->second;
  }
  const SymbolId head = bank_.head(t);
  auto blockIt = blockOf_.find(head);
  if (blockIt == blockOf_.end()) blockIt = blockOf_.emplace(head, model_.blockFor(bank_.symbol(head))).first;
  const std::uint32_t block = blockIt->second;
  std::vector<ad::Vector> args;
  for (TermId a : bank_.args(t)) args.push_back(embedTerm(a));
  ad::Vector v = applyBlock(block, args);
  if (useCache_) terms_.emplace(t, v);
  return v;
}

ad::Vector NeuralEvaluator::embedLiteral(const Literal& l) {
  const std::uint64_t key = (std::uint64_t{l.atom} << 1) | (l.positive ? 1u : 0u);
  if (useCache_) {
    if (auto it = literals_.find(key); it != literals_.end()) return it->second;
  }
  ad::Vector v = embedTerm(l.atom);
  if (!l.positive) {
    const std::array<ad::Vector, 1> arg{v};
    v = applyBlock(model_.negationBlock(), arg);
  }
  if (useCache_) literals_.emplace(key, v);
  return v;
}

ad::Vector NeuralEvaluator::embedClause(const Clause& c) {
  if (useCache_) {
    if (auto it = clauses_.find(c.id); it != clauses_.end()) return it->second;
  }
  std::vector<ad::Vector> sequence;
  sequence.reserve(c.literals.size());
  for (const Literal& l : c.literals) sequence.push_back(embedLiteral(l));
  detail::ValueOps ops{model_.parameters()};
  ad::Vector v = detail::runLstm(ops, model_.clauseCombiner(), std::span<const ad::Vector>(sequence));
  if (useCache_) clauses_.emplace(c.id, v);
  return v;
}

ad::Vector NeuralEvaluator::conjectureSummary(std::span<const Clause> conjecture) {
  std::vector<ad::Vector> sequence;
  for (const Clause& c : conjecture) sequence.push_back(embedClause(c));
  detail::ValueOps ops{model_.parameters()};
  return detail::runLstm(ops, model_.conjectureCombiner(), std::span<const ad::Vector>(sequence));
}

Eigen::Vector2d NeuralEvaluator::logits(const Clause& c, const ad::Vector& summary) {
  detail::ValueOps ops{model_.parameters()};
  const ad::Vector x = detail::runFin(ops, model_.fin(), embedClause(c), summary);
  if (!x.allFinite()) throw std::runtime_error("non-finite activation in neural evaluation");
  return {x[0], x[1]};
}

double neuralProbability(const Eigen::Vector2d& x) { return 1.0 / (1.0 + std::exp(x[0] - x[1])); }

double neuralWeight(const Eigen::Vector2d& x) { return x[0] < x[1] ? kPositiveWeight : kNegativeWeight; }

}  // namespace clauselab
