#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "clauselab/parser.hpp"
#include "clauselab/prover.hpp"

namespace clauselab {

void writeExamples(std::ostream& out, const std::vector<TrainingExample>& examples) {
  for (const TrainingExample& ex : examples) {
    nlohmann::json conj = nlohmann::json::array();
    for (const Clause& c : ex.conjecture) conj.push_back(toString(*ex.bank, c));
    nlohmann::json rec{{"problem", ex.problemName},
                       {"label", ex.positive ? "positive" : "negative"},
                       {"clause", toString(*ex.bank, ex.clause)},
                       {"conjecture", std::move(conj)}};
    out << rec.dump() << '\n';
  }
}

std::vector<TrainingExample> readExamples(std::istream& in) {
  struct Group {
    std::shared_ptr<TermBank> bank;
    std::map<std::vector<std::string>, std::vector<Clause>> conjectures;
  };
  std::map<std::string, Group> groups;
  std::vector<TrainingExample> out;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("examples line " + std::to_string(lineNo) + ": " + e.what());
    }
    TrainingExample ex;
    ex.problemName = rec.at("problem").get<std::string>();
    const std::string label = rec.at("label").get<std::string>();
    if (label != "positive" && label != "negative") {
      throw std::runtime_error("examples line " + std::to_string(lineNo) + ": bad label '" + label + "'");
    }
    ex.positive = label == "positive";
    Group& g = groups[ex.problemName];
    if (!g.bank) g.bank = std::make_shared<TermBank>();
    const auto texts = rec.at("conjecture").get<std::vector<std::string>>();
    auto it = g.conjectures.find(texts);
    if (it == g.conjectures.end()) {
      std::vector<Clause> conj;
      for (const std::string& t : texts) {
        Clause c = parseClause(t, *g.bank);
        c.origin = ClauseOrigin::Conjecture;
        conj.push_back(std::move(c));
      }
      it = g.conjectures.emplace(texts, std::move(conj)).first;
    }
    ex.conjecture = it->second;
    ex.clause = parseClause(rec.at("clause").get<std::string>(), *g.bank);
    ex.bank = g.bank;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace clauselab
