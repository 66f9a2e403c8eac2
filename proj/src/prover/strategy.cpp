#include "clauselab/strategy.hpp"

#include <numeric>
#include <stdexcept>

namespace clauselab {

namespace {

class SymbolCountWeigher final : public ClauseWeigher {
 public:
  explicit SymbolCountWeigher(const TermBank& bank) : bank_(bank) {}
  double weight(const Clause& c) override { return static_cast<double>(symbolCount(bank_, c)); }

 private:
  const TermBank& bank_;
};

class FifoWeigher final : public ClauseWeigher {
 public:
  double weight(const Clause&) override { return 0.0; }
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

WeightFunction WeightFunction::model(std::shared_ptr<const ClauseModel> m) {
  if (!m) throw std::invalid_argument("null model");
  WeightFunction w(Builtin::Fifo);
  w.model_ = std::move(m);
  return w;
}

std::string WeightFunction::name() const {
  if (model_) return "model:" + model_->kind();
  return builtin_ == Builtin::SymbolCount ? "symbols" : "fifo";
}

std::unique_ptr<ClauseWeigher> WeightFunction::bind(const TermBank& bank,
                                                    std::span<const Clause> conjecture) const {
  if (model_) return model_->bind(bank, conjecture);
  if (builtin_ == Builtin::SymbolCount) return std::make_unique<SymbolCountWeigher>(bank);
  return std::make_unique<FifoWeigher>();
}

void Strategy::validate() const {
  if (queues.empty()) throw std::invalid_argument("strategy needs at least one queue");
  for (const QueueSpec& q : queues) {
    if (q.frequency == 0) throw std::invalid_argument("queue frequencies must be positive");
  }
}

std::string Strategy::toString() const {
  std::string out;
  for (std::size_t i = 0; i < queues.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(queues[i].frequency) + "*" + queues[i].weight.name();
  }
  return out;
}

Strategy parseStrategy(std::string_view spec, std::shared_ptr<const ClauseModel> model) {
  Strategy s;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    const std::string item = trim(spec.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;
    const auto star = item.find('*');
    if (star == std::string::npos) throw std::invalid_argument("queue '" + item + "' lacks 'freq*'");
    QueueSpec q;
    try {
      q.frequency = static_cast<std::uint32_t>(std::stoul(item.substr(0, star)));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad queue frequency in '" + item + "'");
    }
    const std::string fn = trim(item.substr(star + 1));
    if (fn == "symbols") {
      q.weight = WeightFunction::symbolCount();
    } else if (fn == "fifo") {
      q.weight = WeightFunction::fifo();
    } else if (fn == "model" || fn.starts_with("model:")) {
      if (!model) throw std::invalid_argument("strategy references a model but none was given");
      q.weight = WeightFunction::model(model);
    } else {
      throw std::invalid_argument("unknown weight function '" + fn + "'");
    }
    s.queues.push_back(std::move(q));
  }
  s.validate();
  return s;
}

Strategy baselineStrategy() {
  return Strategy{{QueueSpec{4, WeightFunction::symbolCount()}, QueueSpec{1, WeightFunction::fifo()}}};
}

Strategy combineStrategies(const Strategy& s, std::shared_ptr<const ClauseModel> model, CombineMode mode) {
  s.validate();
  const WeightFunction m = WeightFunction::model(std::move(model));
  if (mode == CombineMode::Solo) return Strategy{{QueueSpec{1, m}}};
  const std::uint32_t total = std::accumulate(s.queues.begin(), s.queues.end(), 0u,
                                              [](std::uint32_t acc, const QueueSpec& q) { return acc + q.frequency; });
  Strategy out;
  out.queues.push_back(QueueSpec{total, m});
  out.queues.insert(out.queues.end(), s.queues.begin(), s.queues.end());
  return out;
}

QueueScheduler::QueueScheduler(std::vector<std::uint32_t> frequencies) : frequencies_(std::move(frequencies)) {
  if (frequencies_.empty()) throw std::invalid_argument("scheduler needs at least one queue");
}

std::optional<std::size_t> QueueScheduler::next(const std::function<bool(std::size_t)>& nonEmpty) {
  const std::size_t k = frequencies_.size();
  for (std::size_t attempt = 0; attempt <= k; ++attempt) {
    if (used_ >= frequencies_[current_]) {
      current_ = (current_ + 1) % k;
      used_ = 0;
    }
    if (nonEmpty(current_)) {
      ++used_;
      return current_;
    }
    current_ = (current_ + 1) % k;
    used_ = 0;
  }
  return std::nullopt;
}

}  // namespace clauselab
