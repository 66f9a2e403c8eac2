#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "clauselab/clause.hpp"
#include "clauselab/strategy.hpp"
#include "clauselab/training_example.hpp"

namespace clauselab {

struct Limits {
  std::uint64_t maxProcessed = 20000;
  /// 0 disables the bound.
  std::uint64_t maxGenerated = 0;
  /// Wall-clock guard; 0 disables it. Step limits are the primary budget.
  double maxSeconds = 0.0;
};

enum class RunStatus { Proved, Saturated, ResourceOut };

std::string toString(RunStatus s);

/// Every clause of a run indexed by id, with the run's bank.
struct ProofTrace {
  std::shared_ptr<TermBank> bank;
  std::vector<Clause> clauses;  // clauses[id].id == id; unused ids have no literals and origin Derived

  const Clause& at(ClauseId id) const { return clauses.at(id); }
};

struct RunReport {
  std::string problemName;
  RunStatus status = RunStatus::ResourceOut;
  std::uint64_t processedCount = 0;
  /// All clauses produced by inferences, before redundancy filtering.
  std::uint64_t generatedCount = 0;
  /// Ids of the clauses of the proof including the empty clause; sorted.
  std::vector<ClauseId> proofClauses;
  /// Given clauses in selection order.
  std::vector<ClauseId> selected;
  double wallSeconds = 0.0;
  std::shared_ptr<const ProofTrace> trace;
};

struct SaturateOptions {
  bool keepTrace = true;
};

/// Given-clause saturation with binary resolution, positive factoring,
/// tautology deletion, duplicate elimination and forward subsumption.
RunReport saturate(const Problem& problem, const Strategy& strategy, const Limits& limits,
                   const SaturateOptions& options = {});

/// Labels every selected given clause by proof membership. Requires a
/// proved report with a trace. Clauses are copied into a compact bank shared
/// by the returned examples.
std::vector<TrainingExample> extractExamples(const RunReport& report, const Problem& problem);

/// One JSON object per line: {"problem", "label", "clause", "conjecture"}.
void writeExamples(std::ostream& out, const std::vector<TrainingExample>& examples);
std::vector<TrainingExample> readExamples(std::istream& in);

}  // namespace clauselab
