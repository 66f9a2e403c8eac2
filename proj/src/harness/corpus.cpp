#include "clauselab/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "clauselab/parser.hpp"

namespace clauselab {

namespace {

using Rng = std::mt19937_64;

std::string constant(int i) { return "c" + std::to_string(i); }

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

class ProblemText {
 public:
  void axiom(const std::string& clause) { add("axiom", clause); }
  void goal(const std::string& clause) { add("negated_conjecture", clause); }
  std::string str() const { return out_.str(); }

 private:
  void add(const char* role, const std::string& clause) {
    out_ << "cnf(" << (role[0] == 'a' ? "a" : "g") << ++count_ << ", " << role << ", " << clause << ").\n";
  }

  std::ostringstream out_;
  int count_ = 0;
};

std::vector<int> permutation(Rng& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

const char* const kUnary[] = {"p", "q", "r", "s", "t"};
const char* const kWrap[] = {"", "f", "g"};

std::string wrap(const std::string& fn, const std::string& arg) { return fn.empty() ? arg : fn + "(" + arg + ")"; }

// Distractor rules over the unary predicates; some of them loop.
void unaryNoise(ProblemText& t, Rng& rng, int count) {
  for (int i = 0; i < count; ++i) {
    const std::string from = kUnary[uniform(rng, 0, 4)];
    const std::string to = kUnary[uniform(rng, 0, 4)];
    switch (uniform(rng, 0, 3)) {
      case 0: t.axiom("~" + from + "(X) | " + to + "(f(X))"); break;
      case 1: t.axiom("~" + from + "(X) | " + to + "(g(X))"); break;
      case 2: t.axiom("~" + from + "(X) | ~" + to + "(Y) | " + from + "(h(X,Y))"); break;
      default: t.axiom(from + "(" + constant(uniform(rng, 0, 9)) + ")"); break;
    }
  }
}

// Chains run upwards through consecutive constants; distractor edges point
// downwards, so constant names keep one meaning across problems.
std::string orderChain(Rng& rng) {
  ProblemText t;
  const int k = uniform(rng, 3, 8);
  const int start = uniform(rng, 0, 9 - k);
  t.axiom("~le(X,Y) | ~le(Y,Z) | le(X,Z)");
  for (int i = start; i < start + k; ++i) t.axiom("le(" + constant(i) + "," + constant(i + 1) + ")");
  for (int i = uniform(rng, 1, 5); i > 0; --i) {
    const int hi = uniform(rng, 1, 9);
    t.axiom("le(" + constant(hi) + "," + constant(uniform(rng, 0, hi - 1)) + ")");
  }
  unaryNoise(t, rng, uniform(rng, 6, 16));
  t.goal("~le(" + constant(start) + "," + constant(start + k) + ")");
  return t.str();
}

std::string implicationChain(Rng& rng) {
  ProblemText t;
  const int k = uniform(rng, 2, 6);
  std::vector<int> preds{uniform(rng, 0, 4)};
  for (int i = 0; i < k; ++i) {
    int next = uniform(rng, 0, 3);
    if (next >= preds.back()) ++next;
    preds.push_back(next);
  }
  const std::string start = constant(uniform(rng, 0, 9));
  std::string term = start;
  for (int i = 0; i < k; ++i) {
    const std::string fn = kWrap[uniform(rng, 0, 2)];
    t.axiom("~" + std::string(kUnary[preds[static_cast<std::size_t>(i)]]) + "(X) | " +
            kUnary[preds[static_cast<std::size_t>(i) + 1]] + "(" + wrap(fn, "X") + ")");
    term = wrap(fn, term);
  }
  t.axiom(std::string(kUnary[preds[0]]) + "(" + start + ")");
  unaryNoise(t, rng, uniform(rng, 6, 16));
  t.goal("~" + std::string(kUnary[preds.back()]) + "(" + term + ")");
  return t.str();
}

std::string nesting(Rng& rng) {
  ProblemText t;
  const int k = uniform(rng, 2, 9);
  const std::string fn = kWrap[uniform(rng, 1, 2)];
  const std::string pred = kUnary[uniform(rng, 0, 4)];
  const std::string start = constant(uniform(rng, 0, 9));
  t.axiom("~" + pred + "(X) | " + pred + "(" + fn + "(X))");
  t.axiom(pred + "(" + start + ")");
  unaryNoise(t, rng, uniform(rng, 6, 16));
  std::string term = start;
  for (int i = 0; i < k; ++i) term = wrap(fn, term);
  t.goal("~" + pred + "(" + term + ")");
  return t.str();
}

std::string pigeonhole(Rng& rng) {
  ProblemText t;
  const int holes = std::array{2, 2, 2, 3, 3, 4}[static_cast<std::size_t>(uniform(rng, 0, 5))];
  const int pigeons = holes + 1;
  auto in = [&](int p, int h) { return "in(" + constant(p) + "," + constant(pigeons + h) + ")"; };
  std::vector<std::string> placement;
  for (int p = 0; p < pigeons; ++p) {
    std::string clause;
    for (int h = 0; h < holes; ++h) clause += (h ? " | " : "") + in(p, h);
    placement.push_back(clause);
  }
  for (int h = 0; h < holes; ++h) {
    for (int p = 0; p < pigeons; ++p) {
      for (int q = p + 1; q < pigeons; ++q) t.axiom("~" + in(p, h) + " | ~" + in(q, h));
    }
  }
  for (int p = 1; p < pigeons; ++p) t.axiom(placement[static_cast<std::size_t>(p)]);
  t.goal(placement[0]);
  return t.str();
}

std::string ancestor(Rng& rng) {
  ProblemText t;
  const int n = uniform(rng, 5, 9);
  const auto perm = permutation(rng, 10);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  for (int i = 1; i < n; ++i) {
    parent[static_cast<std::size_t>(i)] = uniform(rng, 0, i - 1);
    t.axiom("par(" + constant(perm[parent[static_cast<std::size_t>(i)]]) + "," + constant(perm[i]) + ")");
  }
  t.axiom("~par(X,Y) | anc(X,Y)");
  t.axiom("~par(X,Y) | ~anc(Y,Z) | anc(X,Z)");
  unaryNoise(t, rng, uniform(rng, 6, 16));
  // Deepest node and one of its proper ancestors; occasionally an unrelated pair.
  int low = n - 1;
  std::vector<int> chain;
  for (int v = parent[static_cast<std::size_t>(low)]; v >= 0; v = parent[static_cast<std::size_t>(v)]) chain.push_back(v);
  int high = chain[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(chain.size()) - 1))];
  if (uniform(rng, 0, 6) == 0) std::swap(high, low);
  t.goal("~anc(" + constant(perm[high]) + "," + constant(perm[low]) + ")");
  return t.str();
}

std::string equalityChain(Rng& rng) {
  ProblemText t;
  const int k = uniform(rng, 2, 4);
  const int start = uniform(rng, 0, 9 - k);
  t.axiom("X != Y | Y = X");
  t.axiom("X != Y | Y != Z | X = Z");
  for (int i = start; i < start + k; ++i) {
    if (uniform(rng, 0, 1)) {
      t.axiom(constant(i) + " = " + constant(i + 1));
    } else {
      t.axiom(constant(i + 1) + " = " + constant(i));
    }
  }
  if (uniform(rng, 0, 2) == 0) t.axiom("X != Y | f(X) = f(Y)");
  unaryNoise(t, rng, uniform(rng, 6, 16));
  t.goal(constant(start) + " != " + constant(start + k));
  return t.str();
}

}  // namespace

std::vector<CorpusProblem> generateCorpus(const CorpusOptions& options) {
  using Family = std::string (*)(Rng&);
  const std::pair<const char*, Family> families[] = {
      {"order", orderChain}, {"implication", implicationChain}, {"nesting", nesting},
      {"pigeon", pigeonhole}, {"ancestor", ancestor},        {"equality", equalityChain},
  };
  std::vector<CorpusProblem> out;
  out.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    const auto& [family, make] = families[i % std::size(families)];
    Rng rng(options.seed * 1000003 + i);
    std::ostringstream name;
    name << family << '_' << std::string(3 - std::min<std::size_t>(3, std::to_string(i).size()), '0') << i;
    out.push_back({name.str(), make(rng)});
  }
  return out;
}

void writeCorpus(const std::filesystem::path& dir, const std::vector<CorpusProblem>& problems) {
  std::filesystem::create_directories(dir);
  for (const CorpusProblem& p : problems) {
    std::ofstream f(dir / (p.name + ".p"));
    if (!f) throw std::runtime_error("cannot write " + (dir / (p.name + ".p")).string());
    f << "% " << p.name << '\n' << p.text;
  }
}

std::vector<CorpusProblem> readCorpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".p") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusProblem> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::ostringstream text;
    text << in.rdbuf();
    out.push_back({f.stem().string(), text.str()});
  }
  return out;
}

ParsedCorpus parseCorpus(const std::vector<CorpusProblem>& corpus) {
  ParsedCorpus out;
  for (const CorpusProblem& p : corpus) {
    try {
      ParseOptions opts;
      opts.problemName = p.name;
      out.problems.push_back(parseProblem(p.text, opts));
    } catch (const std::exception& e) {
      out.errors.emplace_back(p.name, e.what());
    }
  }
  return out;
}

}  // namespace clauselab
