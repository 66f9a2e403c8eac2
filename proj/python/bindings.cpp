#include <fstream>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "clauselab/harness.hpp"
#include "clauselab/hashing.hpp"
#include "clauselab/parser.hpp"

namespace py = pybind11;
using namespace clauselab;

namespace {

Strategy buildStrategy(const std::string& spec, std::shared_ptr<const ClauseModel> model,
                       const std::optional<std::string>& mode) {
  if (!mode) return parseStrategy(spec, model);
  if (!model) throw std::invalid_argument("a mode needs a model");
  if (*mode != "solo" && *mode != "coop") throw std::invalid_argument("mode must be 'solo' or 'coop'");
  return combineStrategies(parseStrategy(spec), model, *mode == "solo" ? CombineMode::Solo : CombineMode::Coop);
}

py::dict ratesDict(const Rates& r) {
  py::dict d;
  d["tp"] = r.tp;
  d["fn"] = r.fn;
  d["tn"] = r.tn;
  d["fp"] = r.fp;
  d["tpr"] = r.tpr();
  d["tnr"] = r.tnr();
  return d;
}

}  // namespace

PYBIND11_MODULE(_clauselab, m) {
  m.doc() = "Saturation prover with learned clause selection";

  m.def("sdbm", [](const py::bytes& s) { return sdbm(std::string(s)); }, py::arg("data"));
  m.def("hash_key", [](const std::string& key, std::uint64_t base) { return hashKey(key, HashConfig(base)); },
        py::arg("key"), py::arg("base"));

  py::class_<Problem>(m, "Problem")
      .def_readonly("name", &Problem::name)
      .def_property_readonly("axiom_count", [](const Problem& p) { return p.axioms.size(); })
      .def_property_readonly("conjecture_count", [](const Problem& p) { return p.conjecture.size(); })
      .def("__str__", &printProblem);

  m.def(
      "parse_problem",
      [](const std::string& text, const std::string& name) {
        ParseOptions opts;
        opts.problemName = name;
        return parseProblem(text, opts);
      },
      py::arg("text"), py::arg("name") = "problem");

  m.def(
      "clause_features",
      [](const std::string& clause) {
        TermBank bank;
        std::map<std::string, std::int64_t> out;
        for (const FeatureEntry& e : extractClauseFeatures(bank, parseClause(clause, bank))) out[e.text] = e.value;
        return out;
      },
      py::arg("clause"), "Feature multiset of one clause as {key: value}.");

  m.def(
      "generate_corpus",
      [](std::size_t count, std::uint64_t seed) {
        std::vector<std::pair<std::string, std::string>> out;
        for (CorpusProblem& p : generateCorpus({count, seed})) out.emplace_back(std::move(p.name), std::move(p.text));
        return out;
      },
      py::arg("count") = 200, py::arg("seed") = 2019, "Bundled problem generator as (name, text) pairs.");

  py::class_<ClauseModel, std::shared_ptr<ClauseModel>>(m, "Model")
      .def_property_readonly("kind", &ClauseModel::kind)
      .def(
          "weight",
          [](const ClauseModel& model, const Problem& problem, const std::string& clause) {
            const Clause c = parseClause(clause, *problem.bank);
            return model.bind(*problem.bank, problem.conjecture)->weight(c);
          },
          py::arg("problem"), py::arg("clause"), "1 for a predicted proof clause, 10 otherwise.")
      .def("save", [](const ClauseModel& model, const std::filesystem::path& path) { saveModel(model, path); });

  m.def(
      "load_model",
      [](const std::filesystem::path& path) { return std::const_pointer_cast<ClauseModel>(loadModel(path)); },
      py::arg("path"));

  py::class_<RunReport>(m, "RunResult")
      .def_readonly("problem", &RunReport::problemName)
      .def_property_readonly("status", [](const RunReport& r) { return toString(r.status); })
      .def_property_readonly("proved", [](const RunReport& r) { return r.status == RunStatus::Proved; })
      .def_readonly("processed", &RunReport::processedCount)
      .def_readonly("generated", &RunReport::generatedCount)
      .def_readonly("seconds", &RunReport::wallSeconds)
      .def_property_readonly("proof_size", [](const RunReport& r) { return r.proofClauses.size(); });

  m.def(
      "solve",
      [](const Problem& problem, const std::string& strategy, std::shared_ptr<ClauseModel> model,
         std::optional<std::string> mode, std::uint64_t maxProcessed, std::uint64_t maxGenerated, double timeout) {
        const Strategy s = buildStrategy(strategy, model, mode);
        py::gil_scoped_release release;
        return saturate(problem, s, {maxProcessed, maxGenerated, timeout}, {false});
      },
      py::arg("problem"), py::arg("strategy") = "4*symbols,1*fifo", py::arg("model") = nullptr,
      py::arg("mode") = std::nullopt, py::arg("max_processed") = 20000, py::arg("max_generated") = 0,
      py::arg("timeout") = 0.0);

  m.def(
      "read_examples",
      [](const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        return readExamples(in).size();
      },
      py::arg("path"), "Number of examples in a JSONL file (validates it).");

  m.def(
      "train",
      [](const std::filesystem::path& examplesPath, const std::string& modelType, std::uint64_t hashBase) {
        std::ifstream in(examplesPath);
        if (!in) throw std::runtime_error("cannot open " + examplesPath.string());
        const auto examples = readExamples(in);
        ModelSpec spec;
        spec.type = parseModelType(modelType);
        spec.name = "M_" + modelType;
        spec.hashBase = hashBase;
        TrainedModel trained;
        {
          py::gil_scoped_release release;
          trained = trainModel(spec, examples);
        }
        return py::make_tuple(std::const_pointer_cast<ClauseModel>(trained.model), ratesDict(trained.training));
      },
      py::arg("examples"), py::arg("model_type") = "trees", py::arg("hash_base") = 0,
      "Returns (model, training rates).");

  m.def(
      "run_bench",
      [](const std::filesystem::path& planPath, const std::optional<std::filesystem::path>& outDir) {
        ExperimentPlan plan = loadPlan(planPath);
        if (outDir) plan.outDir = *outDir;
        BenchResult result;
        {
          py::gil_scoped_release release;
          result = runBench(plan);
        }
        writeBenchReport(result, plan.outDir);
        return formatBenchSummary(result);
      },
      py::arg("plan"), py::arg("out_dir") = std::nullopt, "Runs a plan, writes its report, returns the summary text.");
}
