#include "ranklab/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ranklab/dist.hpp"

namespace ranklab {

std::int64_t rank_of(std::span<const double> values, std::int64_t index) {
  if (index < 1 || index > static_cast<std::int64_t>(values.size()))
    throw std::out_of_range("rank_of: index outside the sample");
  const auto j = static_cast<std::size_t>(index - 1);
  const double x = values[j];
  std::int64_t below = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < x || (values[i] == x && i < j)) ++below;
  return below + 1;
}

void StoppingRule::check_horizon(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("horizon n must be at least 1");
}

std::optional<std::vector<double>> StoppingRule::memoryless_thresholds(std::int64_t) const {
  return std::nullopt;
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

class FixedIndexRule final : public StoppingRule {
public:
  explicit FixedIndexRule(std::int64_t index) : index_(index) {
    if (index < 1) throw std::invalid_argument("fixed index must be at least 1");
  }
  std::string id() const override { return "fixed:" + std::to_string(index_); }
  void check_horizon(std::int64_t n) const override {
    StoppingRule::check_horizon(n);
    if (index_ > n) throw std::invalid_argument("fixed index exceeds the horizon");
  }
  bool stop(std::int64_t, std::span<const double> prefix) const override {
    return static_cast<std::int64_t>(prefix.size()) >= index_;
  }
  std::optional<std::vector<double>> memoryless_thresholds(std::int64_t n) const override {
    std::vector<double> h(static_cast<std::size_t>(n), 0.0);
    h[static_cast<std::size_t>(index_ - 1)] = 1.0;
    return h;
  }

private:
  std::int64_t index_;
};

class MemorylessRule final : public StoppingRule {
public:
  MemorylessRule(std::function<double(std::int64_t, std::int64_t)> h, std::string id)
      : h_(std::move(h)), id_(std::move(id)) {}
  std::string id() const override { return id_; }
  bool stop(std::int64_t n, std::span<const double> prefix) const override {
    const auto j = static_cast<std::int64_t>(prefix.size());
    return prefix.back() <= h_(j, n);
  }
  std::optional<std::vector<double>> memoryless_thresholds(std::int64_t n) const override {
    std::vector<double> h(static_cast<std::size_t>(n));
    for (std::int64_t j = 1; j <= n; ++j) h[static_cast<std::size_t>(j - 1)] = std::clamp(h_(j, n), 0.0, 1.0);
    return h;
  }

private:
  std::function<double(std::int64_t, std::int64_t)> h_;
  std::string id_;
};

class RelativeRankRule final : public StoppingRule {
public:
  explicit RelativeRankRule(std::vector<std::int64_t> cutoffs) : cutoffs_(std::move(cutoffs)) {}
  std::string id() const override { return "relrank-dp:" + std::to_string(cutoffs_.size()); }
  void check_horizon(std::int64_t n) const override {
    StoppingRule::check_horizon(n);
    if (n != static_cast<std::int64_t>(cutoffs_.size()))
      throw std::invalid_argument("relative-rank rule was built for a different horizon");
  }
  bool stop(std::int64_t, std::span<const double> prefix) const override {
    const std::size_t j = prefix.size();
    const std::int64_t cutoff = cutoffs_[j - 1];
    if (cutoff <= 0) return false;
    const double x = prefix.back();
    std::int64_t relative = 1;
    for (std::size_t i = 0; i + 1 < j; ++i) {
      if (prefix[i] < x && ++relative > cutoff) return false;
    }
    return true;
  }

private:
  std::vector<std::int64_t> cutoffs_;
};

class MinOrUniformOracle final : public OracleRule {
public:
  explicit MinOrUniformOracle(double prob) : prob_(prob) {
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("probability must lie in [0,1]");
  }
  std::string id() const override { return "oracle-min-or-uniform:" + format_double(prob_); }
  std::int64_t select(std::span<const double> values, RngStream& rng) const override {
    const auto n = static_cast<std::int64_t>(values.size());
    if (rng.uniform() < prob_)
      return 1 + (std::min_element(values.begin(), values.end()) - values.begin());
    return std::min<std::int64_t>(n, 1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(n)));
  }

private:
  double prob_;
};

class GeometricRankOracle final : public OracleRule {
public:
  explicit GeometricRankOracle(double success) : success_(success) {
    if (!(success > 0.0 && success <= 1.0)) throw std::invalid_argument("success probability must lie in (0,1]");
  }
  std::string id() const override { return "oracle-geometric-rank:" + format_double(success_); }
  std::int64_t select(std::span<const double> values, RngStream& rng) const override {
    const auto n = static_cast<std::int64_t>(values.size());
    std::int64_t target = 1;
    if (success_ < 1.0) {
      const double g = std::floor(std::log(rng.uniform()) / std::log1p(-success_));
      target = g >= static_cast<double>(n - 1) ? n : 1 + static_cast<std::int64_t>(g);
    }
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::nth_element(order.begin(), order.begin() + (target - 1), order.end(),
                     [&](std::int64_t a, std::int64_t b) {
                       return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)] ||
                              (values[static_cast<std::size_t>(a)] == values[static_cast<std::size_t>(b)] && a < b);
                     });
    return 1 + order[static_cast<std::size_t>(target - 1)];
  }

private:
  double success_;
};

} // namespace

RulePtr fixed_index_rule(std::int64_t index) { return std::make_shared<FixedIndexRule>(index); }

RulePtr memoryless_rule(std::function<double(std::int64_t, std::int64_t)> h, std::string id) {
  return std::make_shared<MemorylessRule>(std::move(h), std::move(id));
}

double memoryless_threshold(const MemorylessTheta& theta, std::int64_t j, std::int64_t n) {
  const double remaining = static_cast<double>(n - j) + theta[1];
  const double first = theta[0] == 0.0 ? 0.0 : theta[0] / remaining;
  return std::clamp(first + theta[2] / static_cast<double>(n), 0.0, 1.0);
}

RulePtr memoryless_family_rule(const MemorylessTheta& theta) {
  if (!(theta[0] >= 0.0) || !(theta[2] >= 0.0))
    throw std::invalid_argument("memoryless family needs theta0 >= 0 and theta2 >= 0");
  if (theta[0] != 0.0 && !(theta[1] > 0.0))
    throw std::invalid_argument("memoryless family needs theta1 > 0");
  const std::string id = "memoryless:" + format_double(theta[0]) + "," + format_double(theta[1]) + "," +
                         format_double(theta[2]);
  return memoryless_rule([theta](std::int64_t j, std::int64_t n) { return memoryless_threshold(theta, j, n); },
                         id);
}

RulePtr relative_rank_rule(std::vector<std::int64_t> cutoffs) {
  if (cutoffs.empty()) throw std::invalid_argument("relative-rank rule needs at least one step");
  return std::make_shared<RelativeRankRule>(std::move(cutoffs));
}

OraclePtr oracle_min_or_uniform(double prob_min) { return std::make_shared<MinOrUniformOracle>(prob_min); }

OraclePtr oracle_geometric_rank(double success) { return std::make_shared<GeometricRankOracle>(success); }

// ---------------------------------------------------------------------------

EpisodeOutcome run_episode_on(const StoppingRule& rule, std::span<const double> values) {
  const auto n = static_cast<std::int64_t>(values.size());
  rule.check_horizon(n);
  std::int64_t tau = n;
  for (std::int64_t j = 1; j < n; ++j) {
    if (rule.stop(n, values.first(static_cast<std::size_t>(j)))) {
      tau = j;
      break;
    }
  }
  return {tau, values[static_cast<std::size_t>(tau - 1)], rank_of(values, tau)};
}

EpisodeOutcome run_episode(const StoppingRule& rule, std::int64_t n, RngStream& rng) {
  rule.check_horizon(n);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (auto& x : values) x = rng.uniform();
  return run_episode_on(rule, values);
}

EpisodeOutcome run_oracle_episode(const OracleRule& rule, std::int64_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("horizon n must be at least 1");
  std::vector<double> values(static_cast<std::size_t>(n));
  for (auto& x : values) x = rng.uniform();
  const std::int64_t tau = rule.select(values, rng);
  return {tau, values[static_cast<std::size_t>(tau - 1)], rank_of(values, tau)};
}

MemorylessSampler::MemorylessSampler(std::vector<double> thresholds) : h_(std::move(thresholds)) {
  if (h_.empty()) throw std::invalid_argument("memoryless sampler needs a horizon of at least 1");
  hazard_.resize(h_.size() - 1);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < h_.size(); ++j) {
    const double h = std::clamp(h_[j], 0.0, 1.0);
    acc += h >= 1.0 ? HUGE_VAL : -std::log1p(-h);
    hazard_[j] = acc;
  }
}

EpisodeOutcome MemorylessSampler::sample(RngStream& rng) const {
  const auto n = horizon();
  const double e = -std::log(rng.uniform());
  const auto it = std::lower_bound(hazard_.begin(), hazard_.end(), e);
  const std::int64_t tau = 1 + (it - hazard_.begin());
  const double x = tau < n ? h_[static_cast<std::size_t>(tau - 1)] * rng.uniform() : rng.uniform();

  // Earlier observations are uniform above their thresholds; X_i < x with
  // probability (x - h_i)^+ / (1 - h_i) <= x. Thin Binomial(tau - 1, x)
  // candidates down to those probabilities.
  std::int64_t below = 0;
  const std::int64_t before = tau - 1;
  if (before > 0) {
    const long long candidates = sample_binomial(before, x, rng);
    auto accept = [&](std::int64_t i) {
      const double h = h_[static_cast<std::size_t>(i - 1)];
      const double q = x > h ? (x - h) / (1.0 - h) : 0.0;
      return rng.uniform() * x < q;
    };
    if (candidates <= 64) {
      std::vector<std::int64_t> picked;
      picked.reserve(static_cast<std::size_t>(candidates));
      for (std::int64_t j = before - candidates + 1; j <= before; ++j) {
        const auto t = std::min<std::int64_t>(j, 1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(j)));
        picked.push_back(std::find(picked.begin(), picked.end(), t) == picked.end() ? t : j);
      }
      for (std::int64_t i : picked)
        if (accept(i)) ++below;
    } else {
      // Dense case: direct Bernoulli draws are cheaper than index sampling.
      below = 0;
      for (std::int64_t i = 1; i <= before; ++i) {
        const double h = h_[static_cast<std::size_t>(i - 1)];
        const double q = x > h ? (x - h) / (1.0 - h) : 0.0;
        if (rng.uniform() < q) ++below;
      }
    }
  }
  below += sample_binomial(n - tau, x, rng);
  return {tau, x, below + 1};
}

namespace {

struct EpisodeTally {
  Accumulator rank;
  Accumulator value;
};

RuleEvaluation finish(const std::vector<EpisodeTally>& parts, std::int64_t n, double p, std::int64_t trials) {
  EpisodeTally all;
  for (const auto& t : parts) {
    all.rank.merge(t.rank);
    all.value.merge(t.value);
  }
  return {all.rank.estimate(p), all.value.estimate(p), n, p, trials};
}

void validate(std::int64_t n, double p, std::int64_t trials) {
  if (n < 1) throw std::invalid_argument("horizon n must be at least 1");
  if (!(p > 0.0)) throw std::invalid_argument("moment order p must be positive");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
}

template <class Draw>
RuleEvaluation evaluate_with(std::int64_t n, double p, std::int64_t trials, const ParallelConfig& parallel,
                             Draw&& draw) {
  const double nd = static_cast<double>(n);
  auto parts = run_chunks(trials, parallel, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
    RngStream rng(parallel.seed, parallel.stream_base + static_cast<std::uint64_t>(chunk));
    EpisodeTally tally;
    for (std::int64_t i = begin; i < end; ++i) {
      const EpisodeOutcome o = draw(rng);
      tally.rank.push(std::pow(static_cast<double>(o.rank), p));
      tally.value.push(std::pow(nd * o.x_stopped, p));
    }
    return tally;
  });
  return finish(parts, n, p, trials);
}

} // namespace

RuleEvaluation evaluate_rule(const StoppingRule& rule, std::int64_t n, double p, std::int64_t trials,
                             const ParallelConfig& parallel, EpisodeMode mode) {
  validate(n, p, trials);
  rule.check_horizon(n);
  if (mode == EpisodeMode::Auto) {
    if (auto h = rule.memoryless_thresholds(n)) {
      const MemorylessSampler sampler(std::move(*h));
      return evaluate_with(n, p, trials, parallel, [&](RngStream& rng) { return sampler.sample(rng); });
    }
  }
  return evaluate_with(n, p, trials, parallel, [&](RngStream& rng) {
    thread_local std::vector<double> values;
    values.resize(static_cast<std::size_t>(n));
    for (auto& x : values) x = rng.uniform();
    return run_episode_on(rule, values);
  });
}

RuleEvaluation evaluate_oracle(const OracleRule& rule, std::int64_t n, double p, std::int64_t trials,
                               const ParallelConfig& parallel) {
  validate(n, p, trials);
  return evaluate_with(n, p, trials, parallel, [&](RngStream& rng) { return run_oracle_episode(rule, n, rng); });
}

} // namespace ranklab
