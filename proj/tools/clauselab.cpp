// Command-line front end: solve, generate, extract, train, bench, hash-sweep.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clauselab/harness.hpp"
#include "clauselab/parser.hpp"

namespace {

using namespace clauselab;

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::ofstream openOut(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<TrainingExample> loadExamples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return readExamples(in);
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << 100 * *v << "%";
  return out.str();
}

// Proved runs of the baseline over a corpus, as training examples.
std::vector<TrainingExample> examplesFromCorpus(const ParsedCorpus& corpus, const std::string& strategy,
                                                const Limits& limits, unsigned threads) {
  const auto reports = runCorpus(corpus.problems, parseStrategy(strategy), {limits, threads, true});
  return collectExamples(corpus.problems, reports);
}

ParsedCorpus corpusFrom(const std::string& dir) {
  ParsedCorpus c = parseCorpus(readCorpus(dir));
  for (const auto& [name, message] : c.errors) std::cerr << "warning: " << name << ": " << message << "\n";
  return c;
}

struct SolveArgs {
  std::string problem;
  std::string strategy = "4*symbols,1*fifo";
  std::string model;
  std::string mode;
  std::uint64_t maxProcessed = 20000;
  std::uint64_t maxGenerated = 0;
  double timeout = 0;
  std::string report;
  std::string examples;
};

int solve(const SolveArgs& a) {
  ParseOptions opts;
  opts.problemName = std::filesystem::path(a.problem).stem().string();
  const Problem problem = parseProblem(readFile(a.problem), opts);
  std::shared_ptr<const ClauseModel> model;
  if (!a.model.empty()) model = loadModel(a.model);
  Strategy strategy;
  if (!a.mode.empty()) {
    if (!model) throw CLI::ValidationError("--mode", "requires --model");
    strategy = combineStrategies(parseStrategy(a.strategy), model,
                                 a.mode == "solo" ? CombineMode::Solo : CombineMode::Coop);
  } else {
    strategy = parseStrategy(a.strategy, model);
  }
  const RunReport r = saturate(problem, strategy, {a.maxProcessed, a.maxGenerated, a.timeout},
                               {!a.examples.empty()});
  std::cout << r.problemName << ": " << toString(r.status) << ", processed " << r.processedCount << ", generated "
            << r.generatedCount << ", " << r.wallSeconds << " s\n";
  if (!a.report.empty()) {
    nlohmann::json j{{"problem", r.problemName},         {"strategy", strategy.toString()},
                     {"status", toString(r.status)},     {"processed", r.processedCount},
                     {"generated", r.generatedCount},    {"seconds", r.wallSeconds},
                     {"proofClauses", r.proofClauses.size()}};
    openOut(a.report) << j.dump(2) << "\n";
  }
  if (!a.examples.empty()) {
    if (r.status != RunStatus::Proved) throw std::runtime_error("no proof found, no examples to write");
    auto out = openOut(a.examples);
    writeExamples(out, extractExamples(r, problem));
  }
  return 0;
}

struct ExtractArgs {
  std::string examples;
  std::string corpus;
  std::string strategy = "4*symbols,1*fifo";
  std::uint64_t maxProcessed = 20000;
  std::uint64_t maxGenerated = 200000;
  unsigned threads = 1;
  std::string examplesOut;
  std::string out;
  std::uint64_t hashBase = 0;
};

int extract(const ExtractArgs& a) {
  std::vector<TrainingExample> examples;
  if (!a.examples.empty()) {
    examples = loadExamples(a.examples);
  } else {
    examples = examplesFromCorpus(corpusFrom(a.corpus), a.strategy, {a.maxProcessed, a.maxGenerated, 0}, a.threads);
  }
  if (examples.empty()) throw std::runtime_error("no training examples");
  if (!a.examplesOut.empty()) {
    auto out = openOut(a.examplesOut);
    writeExamples(out, examples);
  }
  const FeatureSpace space = a.hashBase == 0 ? buildSpace(examples) : FeatureSpace::hashed(a.hashBase);
  const LabeledVectors data = vectorizeExamples(examples, space);
  auto out = openOut(a.out);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    out << (data.labels[i] ? 1 : 0);
    for (const auto& [index, value] : data.rows[i].entries) out << ' ' << index << ':' << value;
    out << '\n';
  }
  // Sidecar: one line per used index.
  std::set<std::uint32_t> used;
  for (const FeatureVector& v : data.rows) {
    for (const auto& e : v.entries) used.insert(e.first);
  }
  auto keys = openOut(a.out + ".keys");
  keys << "# dimension " << data.dimension << "\n";
  for (std::uint32_t index : used) keys << index << ' ' << space.describe(index) << '\n';
  std::cout << data.rows.size() << " vectors of dimension " << data.dimension << " written to " << a.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string examples;
  std::string type = "trees";
  std::string out;
  std::uint64_t hashBase = 0;
  std::uint32_t numTrees = 200;
  std::uint32_t maxDepth = 9;
  std::uint32_t epochs = 0;
  bool noBoost = false;
  std::uint64_t seed = 1;
};

int train(const TrainArgs& a) {
  const auto examples = loadExamples(a.examples);
  ModelSpec spec;
  spec.type = parseModelType(a.type);
  spec.name = "M_" + a.type;
  spec.hashBase = a.hashBase;
  spec.boost = !a.noBoost;
  spec.trees.numTrees = a.numTrees;
  spec.trees.maxDepth = a.maxDepth;
  spec.neural.seed = a.seed;
  if (a.epochs > 0) {
    spec.linear.epochs = a.epochs;
    spec.neural.epochs = a.epochs;
  }
  const TrainedModel trained = trainModel(spec, examples);
  saveModel(*trained.model, a.out);
  std::cout << spec.name << " on " << examples.size() << " examples: training TPR "
            << percent(trained.training.tpr()) << ", TNR " << percent(trained.training.tnr()) << "\n";
  return 0;
}

struct BenchArgs {
  std::string corpus;
  std::string plan;
  std::string out;
  std::optional<std::uint64_t> hashBase;
  std::optional<unsigned> threads;
};

int bench(const BenchArgs& a) {
  ExperimentPlan plan = a.plan.empty() ? ExperimentPlan{} : loadPlan(a.plan);
  if (!a.corpus.empty()) plan.corpus = a.corpus;
  if (!a.out.empty()) plan.outDir = a.out;
  if (a.threads) plan.threads = *a.threads;
  if (plan.models.empty()) plan.models.push_back(ModelSpec{.name = "M_tree"});
  if (a.hashBase) {
    for (ModelSpec& m : plan.models) m.hashBase = *a.hashBase;
  }
  const BenchResult result = runBench(plan, &std::cerr);
  writeBenchReport(result, plan.outDir);
  std::cout << formatBenchSummary(result);
  return 0;
}

struct SweepArgs {
  std::string bases = "1024,2048,4096,8192,16384,32768";
  std::string corpus;
  std::string examples;
  std::string plan;
  std::string out = "sweep";
  bool runs = false;
};

int sweep(const SweepArgs& a) {
  ExperimentPlan plan = a.plan.empty() ? ExperimentPlan{} : loadPlan(a.plan);
  if (!a.corpus.empty()) plan.corpus = a.corpus;
  std::vector<std::uint64_t> bases;
  std::istringstream list(a.bases);
  for (std::string item; std::getline(list, item, ',');) {
    if (!item.empty()) bases.push_back(std::stoull(item));
  }
  if (bases.empty()) bases = plan.hashBases;

  SweepResult result;
  if (!a.examples.empty()) {
    if (a.runs) throw CLI::ValidationError("--runs", "needs a corpus, not an example file");
    result = hashSweep(loadExamples(a.examples), bases, {}, nullptr, plan, &std::cerr);
  } else {
    const ParsedCorpus corpus = planCorpus(plan);
    MethodRuns baseline{"baseline",
                        runCorpus(corpus.problems, parseStrategy(plan.baseline), {plan.limits, plan.threads, true})};
    const auto examples = collectExamples(corpus.problems, baseline.reports);
    for (RunReport& r : baseline.reports) r.trace.reset();
    result = hashSweep(examples, bases, corpus.problems, a.runs || plan.sweepRuns ? &baseline : nullptr, plan,
                       &std::cerr);
  }
  writeSweepReport(result, a.out);
  std::cout << formatSweepSummary(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clauselab: learned clause selection for a saturation prover"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solveCmd = app.add_subcommand("solve", "Run the prover on one problem");
  solveCmd->add_option("problem", sa.problem, "CNF problem file")->required()->check(CLI::ExistingFile);
  solveCmd->add_option("--strategy", sa.strategy, "Queue spec such as 4*symbols,1*fifo");
  solveCmd->add_option("--model", sa.model, "Trained model file")->check(CLI::ExistingFile);
  solveCmd->add_option("--mode", sa.mode, "Combine the model with the strategy")->check(CLI::IsMember({"solo", "coop"}));
  solveCmd->add_option("--max-processed", sa.maxProcessed, "Processed-clause limit");
  solveCmd->add_option("--max-generated", sa.maxGenerated, "Generated-clause limit (0 = none)");
  solveCmd->add_option("--timeout", sa.timeout, "Wall-clock guard in seconds (0 = none)");
  solveCmd->add_option("--report", sa.report, "JSON report output");
  solveCmd->add_option("--examples", sa.examples, "Write training examples (JSONL) of the proof");

  auto* generateCmd = app.add_subcommand("generate", "Write the bundled problem corpus");
  std::string generateOut;
  CorpusOptions corpusOptions;
  generateCmd->add_option("--out", generateOut, "Output directory")->required();
  generateCmd->add_option("--count", corpusOptions.count, "Number of problems");
  generateCmd->add_option("--seed", corpusOptions.seed, "Generator seed");

  ExtractArgs ea;
  auto* extractCmd = app.add_subcommand("extract", "Write sparse feature vectors and an index sidecar");
  auto* source = extractCmd->add_option_group("source");
  source->add_option("--examples", ea.examples, "Training examples (JSONL)")->check(CLI::ExistingFile);
  source->add_option("--corpus", ea.corpus, "Problem directory to run the strategy on")->check(CLI::ExistingDirectory);
  source->require_option(1);
  extractCmd->add_option("--strategy", ea.strategy, "Strategy for corpus runs");
  extractCmd->add_option("--max-processed", ea.maxProcessed, "Processed-clause limit for corpus runs");
  extractCmd->add_option("--max-generated", ea.maxGenerated, "Generated-clause limit for corpus runs");
  extractCmd->add_option("--threads", ea.threads, "Worker threads for corpus runs");
  extractCmd->add_option("--examples-out", ea.examplesOut, "Also write the examples (JSONL)");
  extractCmd->add_option("--out", ea.out, "Vector file; the sidecar is <out>.keys")->required();
  extractCmd->add_option("--hash-base", ea.hashBase, "Hash base, 0 for indexed features");

  TrainArgs ta;
  auto* trainCmd = app.add_subcommand("train", "Train a clause model");
  trainCmd->add_option("--examples", ta.examples, "Training examples (JSONL)")->required()->check(CLI::ExistingFile);
  trainCmd->add_option("--model-type", ta.type, "Model kind")->check(CLI::IsMember({"linear", "trees", "neural"}));
  trainCmd->add_option("--out", ta.out, "Model file")->required();
  trainCmd->add_option("--hash-base", ta.hashBase, "Hash base, 0 for indexed features");
  trainCmd->add_option("--trees", ta.numTrees, "Number of trees");
  trainCmd->add_option("--depth", ta.maxDepth, "Maximum tree depth");
  trainCmd->add_option("--epochs", ta.epochs, "Epochs (linear, neural)");
  trainCmd->add_flag("--no-boost", ta.noBoost, "Skip accuracy-balancing boosting (linear)");
  trainCmd->add_option("--seed", ta.seed, "Seed (neural)");

  BenchArgs ba;
  auto* benchCmd = app.add_subcommand("bench", "Run an experiment plan");
  benchCmd->add_option("--corpus", ba.corpus, "Problem directory (default: generated corpus)");
  benchCmd->add_option("--plan", ba.plan, "JSON plan file")->check(CLI::ExistingFile);
  benchCmd->add_option("--out", ba.out, "Report directory");
  benchCmd->add_option("--hash-base", ba.hashBase, "Hash base for every model, 0 for indexed features");
  benchCmd->add_option("--threads", ba.threads, "Worker threads");

  SweepArgs wa;
  auto* sweepCmd = app.add_subcommand("hash-sweep", "Train over a range of hash bases");
  sweepCmd->add_option("--bases", wa.bases, "Comma-separated hash bases");
  sweepCmd->add_option("--corpus", wa.corpus, "Problem directory (default: generated corpus)");
  sweepCmd->add_option("--examples", wa.examples, "Use these examples instead of running the baseline");
  sweepCmd->add_option("--plan", wa.plan, "JSON plan file")->check(CLI::ExistingFile);
  sweepCmd->add_option("--out", wa.out, "Report directory");
  sweepCmd->add_flag("--runs", wa.runs, "Also run solo and coop prover evaluations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solveCmd) return solve(sa);
    if (*generateCmd) {
      writeCorpus(generateOut, generateCorpus(corpusOptions));
      std::cout << corpusOptions.count << " problems written to " << generateOut << "\n";
      return 0;
    }
    if (*extractCmd) return extract(ea);
    if (*trainCmd) return train(ta);
    if (*benchCmd) return bench(ba);
    if (*sweepCmd) return sweep(wa);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
