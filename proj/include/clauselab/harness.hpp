#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clauselab/corpus.hpp"
#include "clauselab/linear_model.hpp"
#include "clauselab/neural_model.hpp"
#include "clauselab/prover.hpp"
#include "clauselab/tree_model.hpp"

namespace clauselab {

// ---- model files ---------------------------------------------------------

/// Dispatches on the header line of any model file.
std::shared_ptr<const ClauseModel> readModel(std::istream& in);
std::shared_ptr<const ClauseModel> loadModel(const std::filesystem::path& path);
void saveModel(const ClauseModel& model, const std::filesystem::path& path);

// ---- corpus runs ---------------------------------------------------------

struct RunOptions {
  Limits limits;
  /// Worker threads; problems are independent so results do not depend on it.
  unsigned threads = 1;
  /// Keep traces of proved runs (needed for example extraction).
  bool keepProofTraces = false;
};

/// One report per problem, in input order.
std::vector<RunReport> runCorpus(std::span<const Problem> problems, const Strategy& strategy,
                                 const RunOptions& options = {});

/// Training examples of every proved run; `reports` must carry traces.
std::vector<TrainingExample> collectExamples(std::span<const Problem> problems,
                                             std::span<const RunReport> reports);

// ---- classification ------------------------------------------------------

struct Rates {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;

  /// Undefined without positives (resp. negatives).
  std::optional<double> tpr() const;
  std::optional<double> tnr() const;
};

Rates classificationRates(const std::vector<bool>& predicted, const std::vector<bool>& labels);

/// Binds the model once per problem and counts a clause as predicted
/// positive when its weight lies below the midpoint of the two weights.
Rates classificationRates(const ClauseModel& model, std::span<const TrainingExample> examples);

// ---- training ------------------------------------------------------------

enum class ModelType { Linear, Trees, Neural };

ModelType parseModelType(std::string_view name);
std::string toString(ModelType t);

struct ModelSpec {
  std::string name;
  ModelType type = ModelType::Trees;
  /// 0 selects an indexed feature space.
  std::uint64_t hashBase = 0;
  LinearParams linear;
  bool boost = true;  // linear only
  TreeParams trees;
  NeuralConfig neural;
};

struct TrainedModel {
  std::shared_ptr<const ClauseModel> model;
  Rates training;
  std::uint32_t vectorDimension = 0;  // 0 for the neural model
};

TrainedModel trainModel(const ModelSpec& spec, std::span<const TrainingExample> examples);

/// Number of distinct clause-side feature keys in the examples.
std::size_t featureKeyCount(std::span<const TrainingExample> examples);

// ---- solved-problem statistics -------------------------------------------

struct MethodRuns {
  std::string name;
  std::vector<RunReport> reports;
};

std::set<std::string> solvedSet(const MethodRuns& runs);

struct SolvedRow {
  std::string method;
  std::size_t solved = 0;
  std::size_t unique = 0;  // solved by no other listed method
  std::size_t plus = 0;    // solved, baseline failed
  std::size_t minus = 0;   // baseline solved, this failed
};

/// Throws std::invalid_argument unless all runs cover the same problems.
std::vector<SolvedRow> solvedStats(std::span<const MethodRuns> methods, const MethodRuns& baseline);

struct SolvedSet {
  std::string method;
  std::set<std::string> problems;
};

struct GreedyStep {
  std::string method;
  std::size_t addition = 0;
  std::size_t runningTotal = 0;
};

/// Repeatedly picks the method covering the most uncovered problems, ties
/// by name. Throws on an empty input.
std::vector<GreedyStep> greedySequence(std::span<const SolvedSet> sets);

struct RatioSummary {
  std::optional<double> mean;
  std::optional<double> sd;  // population standard deviation
  std::size_t eligible = 0;  // problems in the eligible set
  std::size_t excluded = 0;  // eligible but with a zero baseline count
};

struct EfficiencyRow {
  std::string method;
  RatioSummary asrpa;  // processed / baseline processed, all methods proved
  RatioSummary nsrga;  // generated / baseline generated, all methods ran out
};

/// Eligible sets are taken across the baseline and every listed method.
/// Zero baseline counts drop the problem with a message in `warnings`.
std::vector<EfficiencyRow> asrpaNsrga(std::span<const MethodRuns> methods, const MethodRuns& baseline,
                                      std::vector<std::string>* warnings = nullptr);

// ---- experiments ---------------------------------------------------------

struct ExperimentPlan {
  /// Directory of `*.p` files; empty generates the bundled corpus.
  std::filesystem::path corpus;
  std::size_t generateCount = 200;
  std::uint64_t seed = 2019;
  std::string baseline = "4*symbols,1*fifo";
  Limits limits{20000, 200000, 0.0};
  unsigned threads = 1;
  std::vector<ModelSpec> models;
  std::vector<CombineMode> modes{CombineMode::Solo, CombineMode::Coop};
  std::vector<std::uint64_t> hashBases;
  /// Run prover evaluations for each hash-sweep row, not just rates.
  bool sweepRuns = false;
  std::filesystem::path outDir = "report";
};

ExperimentPlan readPlan(std::istream& in);
ExperimentPlan loadPlan(const std::filesystem::path& path);

/// Problems of the plan's corpus, parse errors included.
ParsedCorpus planCorpus(const ExperimentPlan& plan);

struct ModelResult {
  ModelSpec spec;
  TrainedModel trained;
};

struct BenchResult {
  std::size_t problemCount = 0;
  std::vector<std::pair<std::string, std::string>> parseErrors;
  std::size_t exampleCount = 0;
  std::size_t positiveCount = 0;
  std::vector<ModelResult> models;
  std::vector<MethodRuns> runs;  // baseline first
  std::vector<SolvedRow> solved;
  std::vector<GreedyStep> greedy;
  std::vector<EfficiencyRow> efficiency;
  std::vector<std::string> warnings;
};

/// Baseline run, example extraction, model training, combined-strategy runs
/// and the derived tables.
BenchResult runBench(const ExperimentPlan& plan, std::ostream* progress = nullptr);

struct SweepRow {
  std::string base;  // "off" or the base
  ModelType type = ModelType::Trees;
  std::optional<double> tpr;
  std::optional<double> tnr;
  std::uint64_t collidingFeatures = 0;
  std::optional<std::size_t> soloSolved;
  std::optional<std::size_t> coopSolved;
  std::optional<double> soloAsrpa;
  std::optional<double> coopAsrpa;
};

struct SweepResult {
  std::size_t featureKeys = 0;
  std::vector<SweepRow> rows;
};

/// For each base and "off", trains a linear and a tree model on the
/// examples and reports training rates and collisions; with
/// `baselineRuns`, also solo and coop solved counts and ASRPA.
SweepResult hashSweep(std::span<const TrainingExample> examples, std::span<const std::uint64_t> bases,
                      std::span<const Problem> problems = {}, const MethodRuns* baselineRuns = nullptr,
                      const ExperimentPlan& plan = {}, std::ostream* progress = nullptr);

// ---- reports -------------------------------------------------------------

/// `report.json`, `runs.csv` and `summary.txt` in `dir`.
void writeBenchReport(const BenchResult& result, const std::filesystem::path& dir);
void writeSweepReport(const SweepResult& result, const std::filesystem::path& dir);

std::string formatBenchSummary(const BenchResult& result);
std::string formatSweepSummary(const SweepResult& result);

}  // namespace clauselab
