#include "clauselab/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace clauselab {

namespace {

constexpr std::string_view kHeader = "clauselab-linear";
constexpr int kFormatVersion = 1;

// log(1 + exp(-z)) without overflow.
double softplusNeg(double z) { return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(const FeatureVector& v, std::span<const double> w) {
  double s = 0;
  for (const auto& [i, x] : v.entries) s += w[i] * static_cast<double>(x);
  return s;
}

void checkData(const LabeledVectors& data, const FeatureSpace& space) {
  if (data.rows.empty()) throw std::invalid_argument("no training data");
  if (data.rows.size() != data.labels.size()) throw std::invalid_argument("row/label count mismatch");
  for (const FeatureVector& r : data.rows) {
    if (r.dimension != space.vectorDimension()) {
      throw std::invalid_argument("vector dimension " + std::to_string(r.dimension) + " does not match space dimension " +
                                  std::to_string(space.vectorDimension()));
    }
  }
}

struct Rates {
  double tpr = 0;
  double tnr = 0;
};

Rates trainingRates(const LinearModel& m, const LabeledVectors& data) {
  std::size_t pos = 0, neg = 0, tp = 0, tn = 0;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const bool predicted = m.classify(data.rows[i]);
    if (data.labels[i]) {
      ++pos;
      tp += predicted;
    } else {
      ++neg;
      tn += !predicted;
    }
  }
  return {pos ? double(tp) / double(pos) : 1.0, neg ? double(tn) / double(neg) : 1.0};
}

class LinearWeigher final : public ClauseWeigher {
 public:
  LinearWeigher(const LinearModel& model, const TermBank& bank, std::span<const Clause> conjecture)
      : model_(model), vectorizer_(model.space(), bank, conjecture) {}

  double weight(const Clause& c) override {
    return model_.classify(vectorizer_(c)) ? kPositiveWeight : kNegativeWeight;
  }

 private:
  const LinearModel& model_;
  BoundVectorizer vectorizer_;
};

}  // namespace

LinearModel::LinearModel(FeatureSpace space, std::vector<double> weights, double bias)
    : space_(std::move(space)), weights_(std::move(weights)), bias_(bias) {
  if (weights_.size() != space_.vectorDimension()) {
    throw std::invalid_argument("weight vector length does not match the feature space");
  }
}

double LinearModel::score(const FeatureVector& v) const {
  if (v.dimension != weights_.size()) throw std::invalid_argument("vector dimension mismatch");
  return dot(v, weights_) + bias_;
}

std::unique_ptr<ClauseWeigher> LinearModel::bind(const TermBank& bank, std::span<const Clause> conjecture) const {
  return std::make_unique<LinearWeigher>(*this, bank, conjecture);
}

void LinearModel::save(std::ostream& out) const {
  out << kHeader << ' ' << kFormatVersion << '\n';
  out << "dimension " << weights_.size() << '\n';
  out << std::setprecision(17) << "bias " << bias_ << '\n';
  out << "mode " << (space_.isHashed() ? "hashed" : "indexed") << '\n';
  writeSpace(out, space_);
  std::size_t nonzero = 0;
  for (double w : weights_) nonzero += w != 0;
  out << "weights " << nonzero << '\n';
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0) out << i << ':' << weights_[i] << '\n';
  }
}

std::shared_ptr<LinearModel> LinearModel::load(std::istream& in) {
  std::string word, mode;
  int version = 0;
  if (!(in >> word >> version) || word != kHeader) throw std::runtime_error("not a linear model file");
  if (version != kFormatVersion) throw std::runtime_error("unsupported linear model version " + std::to_string(version));
  std::size_t dimension = 0, nonzero = 0;
  double bias = 0;
  if (!(in >> word >> dimension) || word != "dimension") throw std::runtime_error("expected dimension");
  if (!(in >> word >> bias) || word != "bias") throw std::runtime_error("expected bias");
  if (!(in >> word >> mode) || word != "mode") throw std::runtime_error("expected mode");
  FeatureSpace space = readSpace(in);
  if ((mode == "hashed") != space.isHashed()) throw std::runtime_error("space mode mismatch");
  if (space.vectorDimension() != dimension) throw std::runtime_error("dimension does not match the stored space");
  if (!(in >> word >> nonzero) || word != "weights") throw std::runtime_error("expected weights");
  std::vector<double> w(dimension, 0.0);
  for (std::size_t k = 0; k < nonzero; ++k) {
    std::size_t index = 0;
    char colon = 0;
    double value = 0;
    if (!(in >> index >> colon >> value) || colon != ':' || index >= dimension) {
      throw std::runtime_error("malformed weight line");
    }
    w[index] = value;
  }
  return std::make_shared<LinearModel>(std::move(space), std::move(w), bias);
}

double logisticObjective(const LabeledVectors& data, std::span<const std::uint32_t> multiplicity,
                         std::span<const double> weights, double bias, double l2, std::vector<double>* gradWeights,
                         double* gradBias) {
  if (gradWeights) gradWeights->assign(weights.size(), 0.0);
  if (gradBias) *gradBias = 0;
  double total = 0, count = 0;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const double m = multiplicity.empty() ? 1.0 : multiplicity[i];
    if (m == 0) continue;
    const double y = data.labels[i] ? 1.0 : -1.0;
    const double z = y * (dot(data.rows[i], weights) + bias);
    total += m * softplusNeg(z);
    count += m;
    if (gradWeights || gradBias) {
      // d/ds log(1 + exp(-y s)) = -y * sigmoid(-y s)
      const double g = -y * sigmoid(-z) * m;
      if (gradWeights) {
        for (const auto& [j, x] : data.rows[i].entries) (*gradWeights)[j] += g * static_cast<double>(x);
      }
      if (gradBias) *gradBias += g;
    }
  }
  if (count == 0) throw std::invalid_argument("no training data");
  double norm = 0;
  for (double w : weights) norm += w * w;
  if (gradWeights) {
    for (std::size_t j = 0; j < weights.size(); ++j) (*gradWeights)[j] = (*gradWeights)[j] / count + l2 * weights[j];
  }
  if (gradBias) *gradBias /= count;
  return total / count + 0.5 * l2 * norm;
}

std::shared_ptr<LinearModel> trainLinear(const LabeledVectors& data, const FeatureSpace& space,
                                         const LinearParams& params, std::span<const std::uint32_t> multiplicity) {
  checkData(data, space);
  if (!multiplicity.empty() && multiplicity.size() != data.rows.size()) {
    throw std::invalid_argument("multiplicity length mismatch");
  }
  const std::size_t dim = space.vectorDimension();

  std::vector<double> scale(dim, 1.0);
  if (params.scaleFeatures) {
    std::vector<double> maxAbs(dim, 0.0);
    for (const FeatureVector& r : data.rows) {
      for (const auto& [j, x] : r.entries) maxAbs[j] = std::max(maxAbs[j], std::abs(static_cast<double>(x)));
    }
    for (std::size_t j = 0; j < dim; ++j) scale[j] = maxAbs[j] > 0 ? maxAbs[j] : 1.0;
  }

  // Descent runs on scaled weights; raw[j] = w[j] / scale[j] keeps the
  // integer vectors untouched.
  std::vector<double> w(dim, 0.0), raw(dim, 0.0), grad;
  double b = 0, gb = 0;
  auto toRaw = [&](std::span<const double> ws) {
    for (std::size_t j = 0; j < dim; ++j) raw[j] = ws[j] / scale[j];
  };
  auto objective = [&](std::span<const double> ws, double bias, bool withGrad) {
    toRaw(ws);
    // Regularize the scaled weights: |w|^2 = sum (raw_j * scale_j)^2.
    const double loss = logisticObjective(data, multiplicity, raw, bias, 0.0, withGrad ? &grad : nullptr,
                                          withGrad ? &gb : nullptr);
    double norm = 0;
    for (double x : ws) norm += x * x;
    if (withGrad) {
      for (std::size_t j = 0; j < dim; ++j) grad[j] = grad[j] / scale[j] + params.l2 * ws[j];
    }
    return loss + 0.5 * params.l2 * norm;
  };

  LinearTrainingMeta meta;
  double current = objective(w, b, true);
  std::vector<double> trial(dim);
  for (std::uint32_t epoch = 0; epoch < params.epochs; ++epoch) {
    double step = params.learningRate;
    double next = current;
    double trialBias = b;
    bool accepted = false;
    std::vector<double> g = grad;
    const double gBias = gb;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t j = 0; j < dim; ++j) trial[j] = w[j] - step * g[j];
      trialBias = b - step * gBias;
      next = objective(trial, trialBias, false);
      if (next <= current) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (accepted) {
      w.swap(trial);
      b = trialBias;
      current = objective(w, b, true);
    }
    meta.lossHistory.push_back(current);
    if (!accepted) break;
  }

  toRaw(w);
  auto model = std::make_shared<LinearModel>(space, raw, b);
  const Rates r = trainingRates(*model, data);
  meta.tpr = r.tpr;
  meta.tnr = r.tnr;
  model->meta = std::move(meta);
  return model;
}

BoostResult boostBalance(const LabeledVectors& data, const FeatureSpace& space, const LinearParams& params,
                         std::uint32_t maxIters) {
  checkData(data, space);
  const bool hasPos = std::find(data.labels.begin(), data.labels.end(), true) != data.labels.end();
  const bool hasNeg = std::find(data.labels.begin(), data.labels.end(), false) != data.labels.end();
  if (!hasPos || !hasNeg) throw std::invalid_argument("boosting needs both labels");

  std::vector<std::uint32_t> copies(data.rows.size(), 1);
  auto positiveSize = [&] {
    std::uint32_t n = 0;
    for (std::size_t i = 0; i < copies.size(); ++i) n += data.labels[i] ? copies[i] : 0;
    return n;
  };

  BoostResult result;
  std::shared_ptr<LinearModel> best;
  double bestBalance = -std::numeric_limits<double>::infinity();
  for (std::uint32_t iter = 0;; ++iter) {
    auto model = trainLinear(data, space, params, copies);
    const Rates r = trainingRates(*model, data);
    result.log.push_back({positiveSize(), r.tpr, r.tnr});
    model->meta.boostIterations = iter;
    // Best-so-far for the non-terminating case: smallest shortfall of TPR.
    const double balance = std::min(r.tpr - r.tnr, 0.0) + 1e-3 * (r.tpr + r.tnr);
    if (balance > bestBalance) {
      bestBalance = balance;
      best = model;
    }
    if (r.tpr >= r.tnr) {
      result.model = model;
      return result;
    }
    if (iter == maxIters) break;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      if (data.labels[i] && !model->classify(data.rows[i])) ++copies[i];
    }
  }
  result.flagged = true;
  best->meta.boostFlagged = true;
  result.model = best;
  return result;
}

double linearWeight(const TermBank& bank, const Clause& c, std::span<const Clause> conjecture,
                    const LinearModel& model) {
  return model.classify(vectorize(bank, c, conjecture, model.space())) ? kPositiveWeight : kNegativeWeight;
}

}  // namespace clauselab
