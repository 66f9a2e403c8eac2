#include "clauselab/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace clauselab {

namespace {

constexpr std::string_view kHeader = "clauselab-trees";
constexpr int kFormatVersion = 1;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::optional<std::int64_t> lookup(const FeatureVector& v, std::uint32_t index) {
  auto it = std::lower_bound(v.entries.begin(), v.entries.end(), index,
                             [](const auto& e, std::uint32_t i) { return e.first < i; });
  if (it != v.entries.end() && it->first == index) return it->second;
  return std::nullopt;
}

bool goesLeft(const TreeNode& n, const FeatureVector& v) {
  const auto value = lookup(v, static_cast<std::uint32_t>(n.feature));
  return value ? static_cast<double>(*value) < n.threshold : n.defaultLeft;
}

struct Stats {
  double g = 0;
  double h = 0;
  std::uint32_t count = 0;

  void add(double dg, double dh) {
    g += dg;
    h += dh;
    ++count;
  }
  Stats operator-(const Stats& o) const { return {g - o.g, h - o.h, count - o.count}; }
};

// Exact greedy, level-wise tree growth over pre-sorted sparse columns.
class Grower {
 public:
  Grower(const LabeledVectors& data, const TreeParams& params) : data_(data), params_(params) {
    columns_.resize(data.dimension);
    for (std::uint32_t r = 0; r < data.rows.size(); ++r) {
      for (const auto& [j, x] : data.rows[r].entries) columns_[j].push_back({static_cast<double>(x), r});
    }
    for (auto& col : columns_) std::sort(col.begin(), col.end());
  }

  DecisionTree grow(std::span<const double> grad, std::span<const double> hess, std::vector<std::int32_t>& rowLeaf) {
    grad_ = grad;
    hess_ = hess;
    DecisionTree tree;
    tree.nodes.emplace_back();
    stats_.assign(1, Stats{});
    rowNode_.assign(data_.rows.size(), 0);
    for (std::size_t r = 0; r < data_.rows.size(); ++r) stats_[0].add(grad[r], hess[r]);

    std::vector<std::int32_t> frontier{0};
    for (std::uint32_t depth = 0; depth < params_.maxDepth && !frontier.empty(); ++depth) {
      const std::vector<SplitChoice> best = findSplits(frontier);
      std::vector<std::int32_t> next;
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        if (best[s].feature == TreeNode::kLeaf) continue;
        const std::int32_t id = frontier[s];
        TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
        n.feature = best[s].feature;
        n.threshold = best[s].threshold;
        n.defaultLeft = best[s].defaultLeft;
        for (int side = 0; side < 2; ++side) {
          const auto child = static_cast<std::int32_t>(tree.nodes.size());
          tree.nodes.emplace_back();
          stats_.emplace_back();
          (side == 0 ? tree.nodes[static_cast<std::size_t>(id)].left : tree.nodes[static_cast<std::size_t>(id)].right) =
              child;
          next.push_back(child);
        }
      }
      for (std::size_t r = 0; r < data_.rows.size(); ++r) {
        const TreeNode& n = tree.nodes[static_cast<std::size_t>(rowNode_[r])];
        if (n.isLeaf()) continue;
        rowNode_[r] = goesLeft(n, data_.rows[r]) ? n.left : n.right;
        stats_[static_cast<std::size_t>(rowNode_[r])].add(grad[r], hess[r]);
      }
      frontier = std::move(next);
    }
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      TreeNode& n = tree.nodes[i];
      if (n.isLeaf()) n.leafScore = -stats_[i].g / (stats_[i].h + params_.lambda) * params_.learningRate;
    }
    rowLeaf = rowNode_;
    return tree;
  }

  SplitChoice rootSplit(std::span<const double> grad, std::span<const double> hess) {
    grad_ = grad;
    hess_ = hess;
    stats_.assign(1, Stats{});
    rowNode_.assign(data_.rows.size(), 0);
    for (std::size_t r = 0; r < data_.rows.size(); ++r) stats_[0].add(grad[r], hess[r]);
    return findSplits({0}).front();
  }

 private:
  double score(const Stats& s) const { return s.g * s.g / (s.h + params_.lambda); }

  void consider(SplitChoice& best, const Stats& total, const Stats& left, std::int32_t feature, double threshold,
                bool defaultLeft) const {
    const Stats right = total - left;
    if (left.count == 0 || right.count == 0) return;
    const double gain = 0.5 * (score(left) + score(right) - score(total)) - params_.gamma;
    if (gain > best.gain) best = {feature, threshold, defaultLeft, gain};
  }

  std::vector<SplitChoice> findSplits(const std::vector<std::int32_t>& frontier) {
    slotOf_.assign(stats_.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) slotOf_[static_cast<std::size_t>(frontier[s])] = std::int32_t(s);
    std::vector<SplitChoice> best(frontier.size());
    std::vector<Stats> acc(frontier.size());
    std::vector<double> last(frontier.size());
    std::vector<std::int32_t> touched;

    auto slotOfRow = [&](std::uint32_t r) { return slotOf_[static_cast<std::size_t>(rowNode_[r])]; };

    for (std::uint32_t j = 0; j < columns_.size(); ++j) {
      const auto& col = columns_[j];
      if (col.empty()) continue;
      const auto feature = static_cast<std::int32_t>(j);

      // Ascending: left = present values below the threshold, absent go right.
      for (const auto& [v, r] : col) {
        const std::int32_t s = slotOfRow(r);
        if (s < 0) continue;
        Stats& a = acc[static_cast<std::size_t>(s)];
        if (a.count == 0) {
          touched.push_back(s);
        } else if (v != last[static_cast<std::size_t>(s)]) {
          consider(best[static_cast<std::size_t>(s)], stats_[static_cast<std::size_t>(frontier[static_cast<std::size_t>(s)])], a,
                   feature, v, false);
        }
        a.add(grad_[r], hess_[r]);
        last[static_cast<std::size_t>(s)] = v;
      }
      for (std::int32_t s : touched) {
        const auto su = static_cast<std::size_t>(s);
        consider(best[su], stats_[static_cast<std::size_t>(frontier[su])], acc[su], feature, last[su] + 1, false);
        acc[su] = Stats{};
      }
      touched.clear();

      // Descending: right = present values at or above the threshold, absent go left.
      for (auto it = col.rbegin(); it != col.rend(); ++it) {
        const auto& [v, r] = *it;
        const std::int32_t s = slotOfRow(r);
        if (s < 0) continue;
        const auto su = static_cast<std::size_t>(s);
        Stats& a = acc[su];
        const Stats& total = stats_[static_cast<std::size_t>(frontier[su])];
        if (a.count == 0) {
          touched.push_back(s);
        } else if (v != last[su]) {
          consider(best[su], total, total - a, feature, last[su], true);
        }
        a.add(grad_[r], hess_[r]);
        last[su] = v;
      }
      for (std::int32_t s : touched) {
        const auto su = static_cast<std::size_t>(s);
        const Stats& total = stats_[static_cast<std::size_t>(frontier[su])];
        consider(best[su], total, total - acc[su], feature, last[su], true);
        acc[su] = Stats{};
      }
      touched.clear();
    }
    return best;
  }

  const LabeledVectors& data_;
  const TreeParams& params_;
  std::vector<std::vector<std::pair<double, std::uint32_t>>> columns_;
  std::span<const double> grad_, hess_;
  std::vector<Stats> stats_;
  std::vector<std::int32_t> rowNode_;
  std::vector<std::int32_t> slotOf_;
};

void checkData(const LabeledVectors& data, const FeatureSpace& space) {
  if (data.rows.empty()) throw std::invalid_argument("no training data");
  if (data.rows.size() != data.labels.size()) throw std::invalid_argument("row/label count mismatch");
  for (const FeatureVector& r : data.rows) {
    if (r.dimension != space.vectorDimension()) throw std::invalid_argument("vector dimension mismatch");
  }
  if (data.dimension != space.vectorDimension()) throw std::invalid_argument("data dimension mismatch");
}

class TreeWeigher final : public ClauseWeigher {
 public:
  TreeWeigher(const TreeEnsemble& e, const TermBank& bank, std::span<const Clause> conjecture)
      : ensemble_(e), vectorizer_(e.space(), bank, conjecture) {}

  double weight(const Clause& c) override {
    return ensemble_.classify(vectorizer_(c)) ? kPositiveWeight : kNegativeWeight;
  }

 private:
  const TreeEnsemble& ensemble_;
  BoundVectorizer vectorizer_;
};

void writeNode(std::ostream& out, const DecisionTree& t, std::int32_t id) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(id)];
  if (n.isLeaf()) {
    out << "leaf " << n.leafScore << '\n';
    return;
  }
  out << "split " << n.feature << ' ' << n.threshold << ' ' << (n.defaultLeft ? 'L' : 'R') << '\n';
  writeNode(out, t, n.left);
  writeNode(out, t, n.right);
}

std::int32_t readNode(std::istream& in, DecisionTree& t, std::size_t& budget) {
  if (budget == 0) throw std::runtime_error("tree has more nodes than declared");
  --budget;
  std::string word;
  if (!(in >> word)) throw std::runtime_error("truncated tree");
  const auto id = static_cast<std::int32_t>(t.nodes.size());
  t.nodes.emplace_back();
  if (word == "leaf") {
    double s = 0;
    if (!(in >> s)) throw std::runtime_error("malformed leaf");
    t.nodes.back().leafScore = s;
    return id;
  }
  if (word != "split") throw std::runtime_error("unknown node kind '" + word + "'");
  TreeNode n;
  char dir = 0;
  if (!(in >> n.feature >> n.threshold >> dir) || n.feature < 0 || (dir != 'L' && dir != 'R')) {
    throw std::runtime_error("malformed split");
  }
  n.defaultLeft = dir == 'L';
  n.left = readNode(in, t, budget);
  n.right = readNode(in, t, budget);
  t.nodes[static_cast<std::size_t>(id)] = n;
  return id;
}

}  // namespace

double DecisionTree::score(const FeatureVector& v) const {
  if (nodes.empty()) return 0;
  std::size_t i = 0;
  while (!nodes[i].isLeaf()) i = static_cast<std::size_t>(goesLeft(nodes[i], v) ? nodes[i].left : nodes[i].right);
  return nodes[i].leafScore;
}

std::uint32_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::uint32_t best = 0;
  std::vector<std::pair<std::int32_t, std::uint32_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes[static_cast<std::size_t>(id)];
    if (n.isLeaf()) {
      best = std::max(best, d);
    } else {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

void DecisionTree::validate(std::uint32_t dimension) const {
  if (nodes.empty()) throw std::logic_error("empty tree");
  std::vector<bool> seen(nodes.size(), false);
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size()) throw std::logic_error("child index out of range");
    if (seen[static_cast<std::size_t>(id)]) throw std::logic_error("node reachable twice");
    seen[static_cast<std::size_t>(id)] = true;
    const TreeNode& n = nodes[static_cast<std::size_t>(id)];
    if (n.isLeaf()) continue;
    if (n.feature < 0 || static_cast<std::uint32_t>(n.feature) >= dimension) throw std::logic_error("bad feature index");
    stack.push_back(n.left);
    stack.push_back(n.right);
  }
}

TreeEnsemble::TreeEnsemble(FeatureSpace space, TreeParams params, std::vector<DecisionTree> trees)
    : space_(std::move(space)), params_(params) {
  for (DecisionTree& t : trees) append(std::move(t));
}

void TreeEnsemble::append(DecisionTree t) {
  t.validate(space_.vectorDimension());
  trees_.push_back(std::move(t));
}

double TreeEnsemble::margin(const FeatureVector& v) const {
  if (v.dimension != space_.vectorDimension()) throw std::invalid_argument("vector dimension mismatch");
  double s = 0;
  for (const DecisionTree& t : trees_) s += t.score(v);
  return s;
}

double TreeEnsemble::probability(const FeatureVector& v) const { return sigmoid(margin(v)); }

std::size_t TreeEnsemble::decisionNodeCount() const {
  std::size_t n = 0;
  for (const DecisionTree& t : trees_) {
    for (const TreeNode& node : t.nodes) n += !node.isLeaf();
  }
  return n;
}

std::vector<FeatureUse> TreeEnsemble::featureUsage() const {
  std::vector<std::uint32_t> counts(space_.vectorDimension(), 0);
  for (const DecisionTree& t : trees_) {
    for (const TreeNode& n : t.nodes) {
      if (!n.isLeaf()) ++counts[static_cast<std::size_t>(n.feature)];
    }
  }
  if (space_.isHashed()) std::cerr << "warning: hashed feature space; usage reported by bucket\n";
  std::vector<FeatureUse> out;
  for (std::uint32_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) out.push_back({i, space_.describe(i), counts[i]});
  }
  std::stable_sort(out.begin(), out.end(), [](const FeatureUse& a, const FeatureUse& b) { return a.count > b.count; });
  return out;
}

std::unique_ptr<ClauseWeigher> TreeEnsemble::bind(const TermBank& bank, std::span<const Clause> conjecture) const {
  return std::make_unique<TreeWeigher>(*this, bank, conjecture);
}

void TreeEnsemble::save(std::ostream& out) const {
  out << kHeader << ' ' << kFormatVersion << '\n' << std::setprecision(17);
  out << "params " << params_.numTrees << ' ' << params_.maxDepth << ' ' << params_.learningRate << ' '
      << params_.lambda << ' ' << params_.gamma << ' ';
  if (params_.positiveScale) {
    out << *params_.positiveScale;
  } else {
    out << "auto";
  }
  out << "\nscale " << appliedPositiveScale << '\n';
  writeSpace(out, space_);
  out << "trees " << trees_.size() << '\n';
  for (const DecisionTree& t : trees_) {
    out << "tree " << t.nodes.size() << '\n';
    writeNode(out, t, 0);
  }
}

std::shared_ptr<TreeEnsemble> TreeEnsemble::load(std::istream& in) {
  std::string word, scale;
  int version = 0;
  if (!(in >> word >> version) || word != kHeader) throw std::runtime_error("not a tree ensemble file");
  if (version != kFormatVersion) throw std::runtime_error("unsupported tree ensemble version " + std::to_string(version));
  TreeParams p;
  if (!(in >> word >> p.numTrees >> p.maxDepth >> p.learningRate >> p.lambda >> p.gamma >> scale) || word != "params") {
    throw std::runtime_error("expected params");
  }
  if (scale != "auto") p.positiveScale = std::stod(scale);
  double applied = 1.0;
  if (!(in >> word >> applied) || word != "scale") throw std::runtime_error("expected scale");
  FeatureSpace space = readSpace(in);
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "trees") throw std::runtime_error("expected trees");
  auto e = std::make_shared<TreeEnsemble>(std::move(space), p);
  e->appliedPositiveScale = applied;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t nodes = 0;
    if (!(in >> word >> nodes) || word != "tree") throw std::runtime_error("expected tree");
    DecisionTree t;
    std::size_t budget = nodes;
    readNode(in, t, budget);
    if (budget != 0) throw std::runtime_error("tree has fewer nodes than declared");
    e->append(std::move(t));
  }
  return e;
}

double weightedLogisticLoss(std::span<const double> margins, const std::vector<bool>& labels, double positiveScale) {
  double total = 0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double z = labels[i] ? margins[i] : -margins[i];
    const double loss = z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    total += (labels[i] ? positiveScale : 1.0) * loss;
  }
  return total;
}

void logisticGradients(std::span<const double> margins, const std::vector<bool>& labels, double positiveScale,
                       std::vector<double>& grad, std::vector<double>& hess) {
  grad.resize(margins.size());
  hess.resize(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double p = sigmoid(margins[i]);
    const double w = labels[i] ? positiveScale : 1.0;
    grad[i] = w * (p - (labels[i] ? 1.0 : 0.0));
    hess[i] = w * p * (1 - p);
  }
}

std::shared_ptr<TreeEnsemble> trainTrees(const LabeledVectors& data, const FeatureSpace& space,
                                         const TreeParams& params) {
  checkData(data, space);
  const auto positives = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), true));
  const std::size_t negatives = data.labels.size() - positives;
  if (positives == 0 || negatives == 0) throw std::invalid_argument("tree training needs both labels");
  const double scale = params.positiveScale.value_or(double(negatives) / double(positives));

  auto ensemble = std::make_shared<TreeEnsemble>(space, params);
  ensemble->appliedPositiveScale = scale;
  Grower grower(data, params);
  std::vector<double> margins(data.rows.size(), 0.0), grad, hess;
  std::vector<std::int32_t> rowLeaf;
  for (std::uint32_t round = 0; round < params.numTrees; ++round) {
    logisticGradients(margins, data.labels, scale, grad, hess);
    DecisionTree tree = grower.grow(grad, hess, rowLeaf);
    for (std::size_t r = 0; r < margins.size(); ++r) margins[r] += tree.nodes[static_cast<std::size_t>(rowLeaf[r])].leafScore;
    ensemble->append(std::move(tree));
    ensemble->lossHistory.push_back(weightedLogisticLoss(margins, data.labels, scale));
  }
  return ensemble;
}

SplitChoice bestRootSplit(const LabeledVectors& data, std::span<const double> grad, std::span<const double> hess,
                          const TreeParams& params) {
  Grower grower(data, params);
  return grower.rootSplit(grad, hess);
}

double treeWeight(const TermBank& bank, const Clause& c, std::span<const Clause> conjecture, const TreeEnsemble& e) {
  return e.classify(vectorize(bank, c, conjecture, e.space())) ? kPositiveWeight : kNegativeWeight;
}

}  // namespace clauselab
