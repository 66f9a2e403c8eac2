#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "clauselab/harness.hpp"

namespace clauselab {

namespace {

using nlohmann::json;

void rejectUnknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw std::runtime_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

ModelSpec parseModelSpec(const json& j) {
  rejectUnknown(j, {"name", "type", "hashBase", "boost", "params"}, "model spec");
  ModelSpec spec;
  spec.type = parseModelType(j.at("type").get<std::string>());
  spec.name = j.value("name", "M_" + toString(spec.type));
  read(j, "hashBase", spec.hashBase);
  read(j, "boost", spec.boost);
  const json params = j.value("params", json::object());
  switch (spec.type) {
    case ModelType::Linear:
      rejectUnknown(params, {"learningRate", "l2", "epochs", "scaleFeatures"}, "linear params");
      read(params, "learningRate", spec.linear.learningRate);
      read(params, "l2", spec.linear.l2);
      read(params, "epochs", spec.linear.epochs);
      read(params, "scaleFeatures", spec.linear.scaleFeatures);
      break;
    case ModelType::Trees:
      rejectUnknown(params, {"numTrees", "maxDepth", "learningRate", "lambda", "gamma", "positiveScale"},
                    "tree params");
      read(params, "numTrees", spec.trees.numTrees);
      read(params, "maxDepth", spec.trees.maxDepth);
      read(params, "learningRate", spec.trees.learningRate);
      read(params, "lambda", spec.trees.lambda);
      read(params, "gamma", spec.trees.gamma);
      if (params.contains("positiveScale")) spec.trees.positiveScale = params.at("positiveScale").get<double>();
      break;
    case ModelType::Neural: {
      rejectUnknown(params,
                    {"n", "m", "rareThreshold", "nonlinearity", "batchSize", "learningRate", "epochs",
                     "positiveClassWeight", "seed", "probabilityOrdering"},
                    "neural params");
      NeuralConfig& c = spec.neural;
      read(params, "n", c.n);
      read(params, "m", c.m);
      read(params, "rareThreshold", c.rareThreshold);
      read(params, "batchSize", c.batchSize);
      read(params, "learningRate", c.learningRate);
      read(params, "epochs", c.epochs);
      read(params, "positiveClassWeight", c.positiveClassWeight);
      read(params, "seed", c.seed);
      read(params, "probabilityOrdering", c.probabilityOrdering);
      if (params.contains("nonlinearity")) {
        const auto name = params.at("nonlinearity").get<std::string>();
        if (name == "relu6") {
          c.nonlinearity = Nonlinearity::Relu6;
        } else if (name == "tanh") {
          c.nonlinearity = Nonlinearity::Tanh;
        } else {
          throw std::runtime_error("unknown nonlinearity '" + name + "'");
        }
      }
      c.validate();
      break;
    }
  }
  return spec;
}

std::string modeName(CombineMode m) { return m == CombineMode::Solo ? "solo" : "coop"; }

std::string methodName(const std::string& model, CombineMode m) { return modeName(m) + ":" + model; }

json optionalJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ratesJson(const Rates& r) {
  return {{"tp", r.tp}, {"fn", r.fn}, {"tn", r.tn}, {"fp", r.fp}, {"tpr", optionalJson(r.tpr())},
          {"tnr", optionalJson(r.tnr())}};
}

json ratioJson(const RatioSummary& s) {
  return {{"mean", optionalJson(s.mean)}, {"sd", optionalJson(s.sd)}, {"eligible", s.eligible},
          {"excluded", s.excluded}};
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << 100 * *v << "%";
  return out.str();
}

std::string meanSd(const RatioSummary& s) {
  if (!s.mean) return "undefined (0 problems)";
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << *s.mean << " +- " << *s.sd << " (" << s.eligible - s.excluded
      << " problems)";
  return out.str();
}

void writeFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

ExperimentPlan readPlan(std::istream& in) {
  const json j = json::parse(in);
  rejectUnknown(j,
                {"corpus", "generate", "baseline", "limits", "threads", "models", "modes", "hashBases", "sweepRuns",
                 "outDir"},
                "plan");
  ExperimentPlan plan;
  if (j.contains("corpus")) plan.corpus = j.at("corpus").get<std::string>();
  if (j.contains("generate")) {
    const json& g = j.at("generate");
    rejectUnknown(g, {"count", "seed"}, "generate");
    read(g, "count", plan.generateCount);
    read(g, "seed", plan.seed);
  }
  read(j, "baseline", plan.baseline);
  if (j.contains("limits")) {
    const json& l = j.at("limits");
    rejectUnknown(l, {"maxProcessed", "maxGenerated", "maxSeconds"}, "limits");
    read(l, "maxProcessed", plan.limits.maxProcessed);
    read(l, "maxGenerated", plan.limits.maxGenerated);
    read(l, "maxSeconds", plan.limits.maxSeconds);
  }
  read(j, "threads", plan.threads);
  if (j.contains("models")) {
    for (const json& m : j.at("models")) plan.models.push_back(parseModelSpec(m));
  }
  if (j.contains("modes")) {
    plan.modes.clear();
    for (const json& m : j.at("modes")) {
      const auto name = m.get<std::string>();
      if (name == "solo") {
        plan.modes.push_back(CombineMode::Solo);
      } else if (name == "coop") {
        plan.modes.push_back(CombineMode::Coop);
      } else {
        throw std::runtime_error("unknown mode '" + name + "'");
      }
    }
  }
  read(j, "hashBases", plan.hashBases);
  read(j, "sweepRuns", plan.sweepRuns);
  if (j.contains("outDir")) plan.outDir = j.at("outDir").get<std::string>();
  parseStrategy(plan.baseline).validate();
  return plan;
}

ExperimentPlan loadPlan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan " + path.string());
  return readPlan(in);
}

ParsedCorpus planCorpus(const ExperimentPlan& plan) {
  if (plan.corpus.empty()) return parseCorpus(generateCorpus({plan.generateCount, plan.seed}));
  return parseCorpus(readCorpus(plan.corpus));
}

BenchResult runBench(const ExperimentPlan& plan, std::ostream* progress) {
  auto log = [&](const std::string& line) {
    if (progress) *progress << line << std::endl;
  };
  BenchResult result;
  ParsedCorpus corpus = planCorpus(plan);
  result.problemCount = corpus.problems.size();
  result.parseErrors = corpus.errors;
  for (const auto& [name, message] : corpus.errors) result.warnings.push_back(name + ": parse error: " + message);

  const Strategy baseline = parseStrategy(plan.baseline);
  RunOptions options{plan.limits, plan.threads, true};
  log("baseline " + baseline.toString() + " on " + std::to_string(corpus.problems.size()) + " problems");
  MethodRuns base{"baseline", runCorpus(corpus.problems, baseline, options)};
  const auto examples = collectExamples(corpus.problems, base.reports);
  for (RunReport& r : base.reports) r.trace.reset();
  result.exampleCount = examples.size();
  for (const TrainingExample& ex : examples) result.positiveCount += ex.positive ? 1 : 0;
  log("baseline solved " + std::to_string(solvedSet(base).size()) + ", " + std::to_string(examples.size()) +
      " examples (" + std::to_string(result.positiveCount) + " positive)");
  result.runs.push_back(std::move(base));

  options.keepProofTraces = false;
  for (const ModelSpec& spec : plan.models) {
    if (examples.empty()) throw std::runtime_error("no training examples: the baseline proved nothing");
    log("training " + spec.name + " (" + toString(spec.type) + ")");
    ModelResult mr{spec, trainModel(spec, examples)};
    log(spec.name + " training TPR " + percent(mr.trained.training.tpr()) + " TNR " +
        percent(mr.trained.training.tnr()));
    for (CombineMode mode : plan.modes) {
      const Strategy s = combineStrategies(baseline, mr.trained.model, mode);
      const std::string name = methodName(spec.name, mode);
      log("running " + name + " = " + s.toString());
      MethodRuns runs{name, runCorpus(corpus.problems, s, options)};
      log(name + " solved " + std::to_string(solvedSet(runs).size()));
      result.runs.push_back(std::move(runs));
    }
    result.models.push_back(std::move(mr));
  }

  const MethodRuns& baseRuns = result.runs.front();
  result.solved = solvedStats(result.runs, baseRuns);
  std::vector<SolvedSet> sets;
  for (const MethodRuns& m : result.runs) sets.push_back({m.name, solvedSet(m)});
  result.greedy = greedySequence(sets);
  result.efficiency = asrpaNsrga(result.runs, baseRuns, &result.warnings);
  return result;
}

SweepResult hashSweep(std::span<const TrainingExample> examples, std::span<const std::uint64_t> bases,
                      std::span<const Problem> problems, const MethodRuns* baselineRuns, const ExperimentPlan& plan,
                      std::ostream* progress) {
  if (examples.empty()) throw std::invalid_argument("hash sweep needs training examples");
  SweepResult result;
  const FeatureSpace indexed = buildSpace(examples);
  result.featureKeys = indexed.keyCount();
  const Strategy baseline = parseStrategy(plan.baseline);
  const bool runProver = baselineRuns != nullptr && !problems.empty();

  std::vector<std::uint64_t> order(bases.begin(), bases.end());
  order.push_back(0);
  for (std::uint64_t base : order) {
    for (ModelType type : {ModelType::Linear, ModelType::Trees}) {
      ModelSpec spec;
      for (const ModelSpec& m : plan.models) {
        if (m.type == type) {
          spec = m;
          break;
        }
      }
      spec.type = type;
      spec.hashBase = base;
      SweepRow row;
      row.base = base == 0 ? "off" : std::to_string(base);
      row.type = type;
      const TrainedModel trained = trainModel(spec, examples);
      row.tpr = trained.training.tpr();
      row.tnr = trained.training.tnr();
      if (base != 0) row.collidingFeatures = collisionReport(indexed, HashConfig(base)).collidingFeatures;
      if (runProver) {
        for (CombineMode mode : {CombineMode::Solo, CombineMode::Coop}) {
          MethodRuns runs{methodName(toString(type), mode),
                          runCorpus(problems, combineStrategies(baseline, trained.model, mode),
                                    RunOptions{plan.limits, plan.threads, false})};
          const std::size_t solved = solvedSet(runs).size();
          const auto eff = asrpaNsrga(std::span(&runs, 1), *baselineRuns);
          (mode == CombineMode::Solo ? row.soloSolved : row.coopSolved) = solved;
          (mode == CombineMode::Solo ? row.soloAsrpa : row.coopAsrpa) = eff.front().asrpa.mean;
        }
      }
      if (progress) {
        *progress << "base " << row.base << " " << toString(type) << " TPR " << percent(row.tpr) << " TNR "
                  << percent(row.tnr) << " colliding " << row.collidingFeatures << std::endl;
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string formatBenchSummary(const BenchResult& r) {
  std::ostringstream out;
  out << "problems " << r.problemCount << ", parse errors " << r.parseErrors.size() << "\n";
  out << "training examples " << r.exampleCount << " (" << r.positiveCount << " positive)\n\n";
  out << "model training rates\n";
  for (const ModelResult& m : r.models) {
    out << "  " << std::left << std::setw(16) << m.spec.name << " TPR " << percent(m.trained.training.tpr())
        << "  TNR " << percent(m.trained.training.tnr()) << "\n";
  }
  out << "\nsolved (unique, +/- vs baseline)\n";
  for (const SolvedRow& s : r.solved) {
    out << "  " << std::left << std::setw(20) << s.method << " " << s.solved << " (" << s.unique << ", +" << s.plus
        << "/-" << s.minus << ")\n";
  }
  out << "\ngreedy cover\n";
  for (const GreedyStep& g : r.greedy) {
    out << "  " << std::left << std::setw(20) << g.method << " +" << g.addition << " = " << g.runningTotal << "\n";
  }
  out << "\nASRPA / NSRGA\n";
  for (const EfficiencyRow& e : r.efficiency) {
    out << "  " << std::left << std::setw(20) << e.method << " " << meanSd(e.asrpa) << " / " << meanSd(e.nsrga)
        << "\n";
  }
  if (!r.warnings.empty()) {
    out << "\nwarnings\n";
    for (const std::string& w : r.warnings) out << "  " << w << "\n";
  }
  return out.str();
}

std::string formatSweepSummary(const SweepResult& r) {
  std::ostringstream out;
  out << "feature keys " << r.featureKeys << "\n";
  out << std::left << std::setw(8) << "base" << std::setw(8) << "model" << std::setw(10) << "TPR" << std::setw(10)
      << "TNR" << std::setw(10) << "collide" << std::setw(8) << "solo" << "coop\n";
  for (const SweepRow& row : r.rows) {
    out << std::left << std::setw(8) << row.base << std::setw(8) << toString(row.type) << std::setw(10)
        << percent(row.tpr) << std::setw(10) << percent(row.tnr) << std::setw(10) << row.collidingFeatures
        << std::setw(8) << (row.soloSolved ? std::to_string(*row.soloSolved) : "-")
        << (row.coopSolved ? std::to_string(*row.coopSolved) : "-") << "\n";
  }
  return out.str();
}

void writeBenchReport(const BenchResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json j;
  j["problems"] = r.problemCount;
  j["parseErrors"] = json::array();
  for (const auto& [name, message] : r.parseErrors) j["parseErrors"].push_back({{"problem", name}, {"error", message}});
  j["examples"] = {{"total", r.exampleCount}, {"positive", r.positiveCount}};
  j["models"] = json::array();
  for (const ModelResult& m : r.models) {
    j["models"].push_back({{"name", m.spec.name}, {"type", toString(m.spec.type)}, {"hashBase", m.spec.hashBase},
                           {"training", ratesJson(m.trained.training)}});
  }
  j["solved"] = json::array();
  for (const SolvedRow& s : r.solved) {
    j["solved"].push_back(
        {{"method", s.method}, {"solved", s.solved}, {"unique", s.unique}, {"plus", s.plus}, {"minus", s.minus}});
  }
  j["greedy"] = json::array();
  for (const GreedyStep& g : r.greedy) {
    j["greedy"].push_back({{"method", g.method}, {"addition", g.addition}, {"runningTotal", g.runningTotal}});
  }
  j["efficiency"] = json::array();
  for (const EfficiencyRow& e : r.efficiency) {
    j["efficiency"].push_back({{"method", e.method}, {"asrpa", ratioJson(e.asrpa)}, {"nsrga", ratioJson(e.nsrga)}});
  }
  j["warnings"] = r.warnings;
  writeFile(dir / "report.json", j.dump(2) + "\n");

  std::ostringstream csv;
  csv << "method,problem,status,processed,generated,seconds\n";
  for (const MethodRuns& m : r.runs) {
    for (const RunReport& rep : m.reports) {
      csv << m.name << ',' << rep.problemName << ',' << toString(rep.status) << ',' << rep.processedCount << ','
          << rep.generatedCount << ',' << rep.wallSeconds << '\n';
    }
  }
  writeFile(dir / "runs.csv", csv.str());
  writeFile(dir / "summary.txt", formatBenchSummary(r));
}

void writeSweepReport(const SweepResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json rows = json::array();
  std::ostringstream csv;
  csv << "base,model,tpr,tnr,colliding,soloSolved,coopSolved,soloAsrpa,coopAsrpa\n";
  auto cell = [](const auto& v) {
    std::ostringstream s;
    if (v) s << *v;
    return s.str();
  };
  for (const SweepRow& row : r.rows) {
    json jr{{"base", row.base}, {"model", toString(row.type)}, {"tpr", optionalJson(row.tpr)},
            {"tnr", optionalJson(row.tnr)}, {"colliding", row.collidingFeatures},
            {"soloAsrpa", optionalJson(row.soloAsrpa)}, {"coopAsrpa", optionalJson(row.coopAsrpa)}};
    jr["soloSolved"] = row.soloSolved ? json(*row.soloSolved) : json(nullptr);
    jr["coopSolved"] = row.coopSolved ? json(*row.coopSolved) : json(nullptr);
    rows.push_back(jr);
    csv << row.base << ',' << toString(row.type) << ',' << cell(row.tpr) << ',' << cell(row.tnr) << ','
        << row.collidingFeatures << ',' << cell(row.soloSolved) << ',' << cell(row.coopSolved) << ','
        << cell(row.soloAsrpa) << ',' << cell(row.coopAsrpa) << '\n';
  }
  writeFile(dir / "sweep.json", json{{"featureKeys", r.featureKeys}, {"rows", rows}}.dump(2) + "\n");
  writeFile(dir / "sweep.csv", csv.str());
  writeFile(dir / "sweep.txt", formatSweepSummary(r));
}

}  // namespace clauselab
