#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "clauselab/features.hpp"
#include "clauselab/strategy.hpp"

namespace clauselab {

struct LinearParams {
  double learningRate = 0.1;
  double l2 = 1e-4;
  std::uint32_t epochs = 200;
  /// Divide each feature by its largest absolute training value before
  /// descent; the returned weights are expressed on raw values.
  bool scaleFeatures = true;
};

struct LinearTrainingMeta {
  std::uint32_t boostIterations = 0;
  double tpr = 0;
  double tnr = 0;
  bool boostFlagged = false;
  std::vector<double> lossHistory;  // objective after each epoch
};

class LinearModel final : public ClauseModel {
 public:
  LinearModel(FeatureSpace space, std::vector<double> weights, double bias);

  const FeatureSpace& space() const { return space_; }
  std::span<const double> weights() const { return weights_; }
  double bias() const { return bias_; }

  double score(const FeatureVector& v) const;
  bool classify(const FeatureVector& v) const { return score(v) > 0; }

  LinearTrainingMeta meta;

  std::string kind() const override { return "linear"; }
  std::unique_ptr<ClauseWeigher> bind(const TermBank& bank, std::span<const Clause> conjecture) const override;

  void save(std::ostream& out) const;
  static std::shared_ptr<LinearModel> load(std::istream& in);

 private:
  FeatureSpace space_;
  std::vector<double> weights_;
  double bias_ = 0;
};

/// Mean logistic loss plus (l2/2)|w|^2. Labels are +1/-1 by `labels`;
/// `multiplicity` (if nonempty) gives each row's copy count. Fills the
/// gradient when the outputs are non-null.
double logisticObjective(const LabeledVectors& data, std::span<const std::uint32_t> multiplicity,
                         std::span<const double> weights, double bias, double l2,
                         std::vector<double>* gradWeights = nullptr, double* gradBias = nullptr);

std::shared_ptr<LinearModel> trainLinear(const LabeledVectors& data, const FeatureSpace& space,
                                         const LinearParams& params = {},
                                         std::span<const std::uint32_t> multiplicity = {});

struct BoostIteration {
  std::uint32_t positiveMultisetSize = 0;
  double tpr = 0;
  double tnr = 0;
};

struct BoostResult {
  std::shared_ptr<LinearModel> model;
  std::vector<BoostIteration> log;  // one entry per trained model
  bool flagged = false;             // stop condition never held
};

/// Retrains with one extra copy of every misclassified positive until
/// TPR >= TNR on the training data or `maxIters` boosting rounds pass.
BoostResult boostBalance(const LabeledVectors& data, const FeatureSpace& space, const LinearParams& params = {},
                         std::uint32_t maxIters = 20);

double linearWeight(const TermBank& bank, const Clause& c, std::span<const Clause> conjecture,
                    const LinearModel& model);

}  // namespace clauselab
