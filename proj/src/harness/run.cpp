#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "clauselab/harness.hpp"

namespace clauselab {

std::shared_ptr<const ClauseModel> readModel(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::istringstream body(text);
  std::string magic;
  std::istringstream(text) >> magic;
  if (magic == "clauselab-linear") return LinearModel::load(body);
  if (magic == "clauselab-trees") return TreeEnsemble::load(body);
  if (magic == "clauselab-neural") return NeuralModel::load(body);
  throw std::runtime_error("unrecognized model file header '" + magic + "'");
}

std::shared_ptr<const ClauseModel> loadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  return readModel(in);
}

void saveModel(const ClauseModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  if (const auto* m = dynamic_cast<const LinearModel*>(&model)) {
    m->save(out);
  } else if (const auto* t = dynamic_cast<const TreeEnsemble*>(&model)) {
    t->save(out);
  } else if (const auto* n = dynamic_cast<const NeuralModel*>(&model)) {
    n->save(out);
  } else {
    throw std::invalid_argument("model kind '" + model.kind() + "' has no file format");
  }
  if (!out) throw std::runtime_error("failed writing model file " + path.string());
}

std::vector<RunReport> runCorpus(std::span<const Problem> problems, const Strategy& strategy,
                                 const RunOptions& options) {
  strategy.validate();
  std::vector<RunReport> reports(problems.size());
  std::vector<std::exception_ptr> failures(problems.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < problems.size(); i = next++) {
      try {
        RunReport r = saturate(problems[i], strategy, options.limits, {options.keepProofTraces});
        if (r.status != RunStatus::Proved) r.trace.reset();
        reports[i] = std::move(r);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(problems.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return reports;
}

std::vector<TrainingExample> collectExamples(std::span<const Problem> problems, std::span<const RunReport> reports) {
  if (problems.size() != reports.size()) throw std::invalid_argument("one report per problem required");
  std::vector<TrainingExample> out;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    if (reports[i].status != RunStatus::Proved) continue;
    auto examples = extractExamples(reports[i], problems[i]);
    out.insert(out.end(), std::make_move_iterator(examples.begin()), std::make_move_iterator(examples.end()));
  }
  return out;
}

ModelType parseModelType(std::string_view name) {
  if (name == "linear") return ModelType::Linear;
  if (name == "trees") return ModelType::Trees;
  if (name == "neural") return ModelType::Neural;
  throw std::invalid_argument("unknown model type '" + std::string(name) + "'");
}

std::string toString(ModelType t) {
  switch (t) {
    case ModelType::Linear: return "linear";
    case ModelType::Trees: return "trees";
    case ModelType::Neural: return "neural";
  }
  return "?";
}

std::size_t featureKeyCount(std::span<const TrainingExample> examples) { return buildSpace(examples).keyCount(); }

TrainedModel trainModel(const ModelSpec& spec, std::span<const TrainingExample> examples) {
  TrainedModel out;
  if (spec.type == ModelType::Neural) {
    auto model = trainNeural(examples, spec.neural);
    out.training = classificationRates(*model, examples);
    out.model = std::move(model);
    return out;
  }

  const FeatureSpace space = spec.hashBase == 0 ? buildSpace(examples) : FeatureSpace::hashed(spec.hashBase);
  const LabeledVectors data = vectorizeExamples(examples, space);
  std::vector<bool> predicted(data.rows.size());
  if (spec.type == ModelType::Linear) {
    auto model = spec.boost ? boostBalance(data, space, spec.linear).model : trainLinear(data, space, spec.linear);
    for (std::size_t i = 0; i < data.rows.size(); ++i) predicted[i] = model->classify(data.rows[i]);
    out.model = std::move(model);
  } else {
    auto model = trainTrees(data, space, spec.trees);
    for (std::size_t i = 0; i < data.rows.size(); ++i) predicted[i] = model->classify(data.rows[i]);
    out.model = std::move(model);
  }
  out.training = classificationRates(predicted, data.labels);
  out.vectorDimension = data.dimension;
  return out;
}

}  // namespace clauselab
