#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "clauselab/harness.hpp"

namespace clauselab {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<std::string> problemNames(const MethodRuns& runs) {
  std::vector<std::string> names;
  names.reserve(runs.reports.size());
  for (const RunReport& r : runs.reports) names.push_back(r.problemName);
  std::sort(names.begin(), names.end());
  return names;
}

void requireSameCorpus(std::span<const MethodRuns> methods, const MethodRuns& baseline) {
  const auto expected = problemNames(baseline);
  if (std::adjacent_find(expected.begin(), expected.end()) != expected.end()) {
    throw std::invalid_argument("baseline runs contain a problem twice");
  }
  for (const MethodRuns& m : methods) {
    if (problemNames(m) != expected) {
      throw std::invalid_argument("runs of '" + m.name + "' and '" + baseline.name + "' cover different problems");
    }
  }
}

std::map<std::string, const RunReport*> byProblem(const MethodRuns& runs) {
  std::map<std::string, const RunReport*> out;
  for (const RunReport& r : runs.reports) out.emplace(r.problemName, &r);
  return out;
}

RatioSummary summarize(const std::vector<double>& ratios, std::size_t eligible) {
  RatioSummary s;
  s.eligible = eligible;
  s.excluded = eligible - ratios.size();
  if (ratios.empty()) return s;
  double sum = 0;
  for (double r : ratios) sum += r;
  const double mean = sum / static_cast<double>(ratios.size());
  double sq = 0;
  for (double r : ratios) sq += (r - mean) * (r - mean);
  s.mean = mean;
  s.sd = std::sqrt(sq / static_cast<double>(ratios.size()));
  return s;
}

}  // namespace

std::optional<double> Rates::tpr() const { return ratio(tp, tp + fn); }
std::optional<double> Rates::tnr() const { return ratio(tn, tn + fp); }

Rates classificationRates(const std::vector<bool>& predicted, const std::vector<bool>& labels) {
  if (predicted.size() != labels.size()) throw std::invalid_argument("prediction and label counts differ");
  Rates r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      ++(predicted[i] ? r.tp : r.fn);
    } else {
      ++(predicted[i] ? r.fp : r.tn);
    }
  }
  return r;
}

Rates classificationRates(const ClauseModel& model, std::span<const TrainingExample> examples) {
  constexpr double kMidpoint = (kPositiveWeight + kNegativeWeight) / 2;
  std::vector<bool> predicted(examples.size());
  std::vector<bool> labels(examples.size());
  std::unique_ptr<ClauseWeigher> weigher;
  const TermBank* boundBank = nullptr;
  std::string boundProblem;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const TrainingExample& ex = examples[i];
    if (!weigher || ex.bank.get() != boundBank || ex.problemName != boundProblem) {
      weigher = model.bind(*ex.bank, ex.conjecture);
      boundBank = ex.bank.get();
      boundProblem = ex.problemName;
    }
    predicted[i] = weigher->weight(ex.clause) < kMidpoint;
    labels[i] = ex.positive;
  }
  return classificationRates(predicted, labels);
}

std::set<std::string> solvedSet(const MethodRuns& runs) {
  std::set<std::string> out;
  for (const RunReport& r : runs.reports) {
    if (r.status == RunStatus::Proved) out.insert(r.problemName);
  }
  return out;
}

std::vector<SolvedRow> solvedStats(std::span<const MethodRuns> methods, const MethodRuns& baseline) {
  requireSameCorpus(methods, baseline);
  std::vector<std::set<std::string>> sets;
  for (const MethodRuns& m : methods) sets.push_back(solvedSet(m));
  const auto base = solvedSet(baseline);

  std::vector<SolvedRow> rows;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    SolvedRow row;
    row.method = methods[i].name;
    row.solved = sets[i].size();
    for (const std::string& p : sets[i]) {
      bool alone = true;
      for (std::size_t j = 0; j < sets.size() && alone; ++j) alone = j == i || !sets[j].contains(p);
      if (alone) ++row.unique;
      if (!base.contains(p)) ++row.plus;
    }
    for (const std::string& p : base) {
      if (!sets[i].contains(p)) ++row.minus;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<GreedyStep> greedySequence(std::span<const SolvedSet> sets) {
  if (sets.empty()) throw std::invalid_argument("greedy sequence needs at least one method");
  std::vector<const SolvedSet*> remaining;
  for (const SolvedSet& s : sets) remaining.push_back(&s);
  std::sort(remaining.begin(), remaining.end(),
            [](const SolvedSet* a, const SolvedSet* b) { return a->method < b->method; });

  std::set<std::string> covered;
  std::vector<GreedyStep> out;
  while (!remaining.empty()) {
    std::size_t best = 0;
    std::size_t bestGain = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      std::size_t gain = 0;
      for (const std::string& p : remaining[i]->problems) gain += covered.contains(p) ? 0 : 1;
      // Strict comparison keeps the alphabetically first method on ties.
      if (i == 0 || gain > bestGain) {
        best = i;
        bestGain = gain;
      }
    }
    covered.insert(remaining[best]->problems.begin(), remaining[best]->problems.end());
    out.push_back({remaining[best]->method, bestGain, covered.size()});
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

std::vector<EfficiencyRow> asrpaNsrga(std::span<const MethodRuns> methods, const MethodRuns& baseline,
                                      std::vector<std::string>* warnings) {
  requireSameCorpus(methods, baseline);
  const auto base = byProblem(baseline);
  std::vector<std::map<std::string, const RunReport*>> indexed;
  for (const MethodRuns& m : methods) indexed.push_back(byProblem(m));

  std::vector<std::string> allProved;
  std::vector<std::string> allOut;
  for (const auto& [name, report] : base) {
    bool proved = report->status == RunStatus::Proved;
    bool out = report->status == RunStatus::ResourceOut;
    for (const auto& m : indexed) {
      const RunStatus s = m.at(name)->status;
      proved = proved && s == RunStatus::Proved;
      out = out && s == RunStatus::ResourceOut;
    }
    if (proved) allProved.push_back(name);
    if (out) allOut.push_back(name);
  }

  std::vector<EfficiencyRow> rows;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    EfficiencyRow row;
    row.method = methods[i].name;
    std::vector<double> ratios;
    for (const std::string& p : allProved) {
      const auto denom = base.at(p)->processedCount;
      if (denom == 0) {
        if (warnings && i == 0) warnings->push_back(p + ": baseline processed no clauses, excluded from ASRPA");
        continue;
      }
      ratios.push_back(static_cast<double>(indexed[i].at(p)->processedCount) / static_cast<double>(denom));
    }
    row.asrpa = summarize(ratios, allProved.size());
    ratios.clear();
    for (const std::string& p : allOut) {
      const auto denom = base.at(p)->generatedCount;
      if (denom == 0) {
        if (warnings && i == 0) warnings->push_back(p + ": baseline generated no clauses, excluded from NSRGA");
        continue;
      }
      ratios.push_back(static_cast<double>(indexed[i].at(p)->generatedCount) / static_cast<double>(denom));
    }
    row.nsrga = summarize(ratios, allOut.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace clauselab
