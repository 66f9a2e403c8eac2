#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "clauselab/clause.hpp"

namespace clauselab {

struct CorpusProblem {
  std::string name;
  std::string text;  // CNF problem text
};

struct CorpusOptions {
  std::size_t count = 200;
  std::uint64_t seed = 2019;
};

/// Small refutation problems over one shared vocabulary: ordering chains,
/// implication chains, nested functions, pigeonhole instances, ancestor
/// relations and equality chains.
std::vector<CorpusProblem> generateCorpus(const CorpusOptions& options = {});

/// Writes one `<name>.p` file per problem.
void writeCorpus(const std::filesystem::path& dir, const std::vector<CorpusProblem>& problems);

/// Reads every `*.p` file in name order.
std::vector<CorpusProblem> readCorpus(const std::filesystem::path& dir);

struct ParsedCorpus {
  std::vector<Problem> problems;
  std::vector<std::pair<std::string, std::string>> errors;  // (problem, message)
};

/// Parse failures are recorded, not thrown.
ParsedCorpus parseCorpus(const std::vector<CorpusProblem>& corpus);

}  // namespace clauselab
