#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranklab/rng.hpp"
#include "ranklab/stats.hpp"

namespace ranklab {

/// 1 + #{i : X_i < X_index} + #{i < index : X_i == X_index}, with a 1-based
/// index. Ties (probability zero for continuous draws) are broken by index.
std::int64_t rank_of(std::span<const double> values, std::int64_t index);

/// Nonanticipating stopping rule on X_1..X_n.
///
/// stop() sees exactly the observed prefix X_1..X_j, which is how
/// adaptedness is enforced. Every episode driver forces a stop at j = n, so
/// a rule never has to handle running off the end.
class StoppingRule {
public:
  virtual ~StoppingRule() = default;

  /// Stable identifier written to CSV output.
  virtual std::string id() const = 0;

  /// Throws std::invalid_argument if the rule cannot be applied at horizon n.
  virtual void check_horizon(std::int64_t n) const;

  virtual bool stop(std::int64_t n, std::span<const double> prefix) const = 0;

  /// A rule that stops at the first j with X_j <= h_j returns h_1..h_n here;
  /// evaluate_rule then samples episodes without drawing the whole sample.
  virtual std::optional<std::vector<double>> memoryless_thresholds(std::int64_t n) const;
};

using RulePtr = std::shared_ptr<const StoppingRule>;

/// Stops at step `index` regardless of the values.
RulePtr fixed_index_rule(std::int64_t index);

/// Stops at the first j with X_j <= h(j, n).
RulePtr memoryless_rule(std::function<double(std::int64_t j, std::int64_t n)> h, std::string id);

/// Parameters of h(j, n) = min(1, theta0 / (n - j + theta1) + theta2 / n).
using MemorylessTheta = std::array<double, 3>;

/// Threshold of the parametric memoryless family; clamped to [0, 1].
double memoryless_threshold(const MemorylessTheta& theta, std::int64_t j, std::int64_t n);

/// Rule from the parametric family. Requires theta0, theta2 >= 0 and
/// theta1 > 0 unless theta0 == 0.
RulePtr memoryless_family_rule(const MemorylessTheta& theta);

/// Stops at step j iff the relative rank of X_j among X_1..X_j is at most
/// cutoffs[j-1].
RulePtr relative_rank_rule(std::vector<std::int64_t> cutoffs);

// ---------------------------------------------------------------------------

/// Selection with access to the whole sample (not a stopping time); covers
/// the arbitrary-joint-distribution case of the boundedness result.
class OracleRule {
public:
  virtual ~OracleRule() = default;
  virtual std::string id() const = 0;
  /// 1-based index into values.
  virtual std::int64_t select(std::span<const double> values, RngStream& rng) const = 0;
};

using OraclePtr = std::shared_ptr<const OracleRule>;

/// Picks the sample minimum with probability prob_min, otherwise a uniform index.
OraclePtr oracle_min_or_uniform(double prob_min);

/// Picks the observation whose rank is Geometric(success) on {1, 2, ...},
/// truncated at n. Its rank moments stay bounded as n grows.
OraclePtr oracle_geometric_rank(double success);

// ---------------------------------------------------------------------------

struct EpisodeOutcome {
  std::int64_t tau = 0; // 1-based
  double x_stopped = 0.0;
  std::int64_t rank = 0;
};

/// Draws X_1..X_n ~ Uniform(0,1), applies the rule sequentially with a forced
/// stop at n, and ranks X_tau against the full sample.
EpisodeOutcome run_episode(const StoppingRule& rule, std::int64_t n, RngStream& rng);

/// Same on a given sample.
EpisodeOutcome run_episode_on(const StoppingRule& rule, std::span<const double> values);

EpisodeOutcome run_oracle_episode(const OracleRule& rule, std::int64_t n, RngStream& rng);

/// Memoryless episode sampled without the full sample: tau by inversion of
/// the survival product, X_tau uniform below its threshold, and the number
/// of smaller observations by thinning (before tau) and a binomial draw
/// (after tau). Exact in distribution.
class MemorylessSampler {
public:
  MemorylessSampler(std::vector<double> thresholds);
  EpisodeOutcome sample(RngStream& rng) const;
  std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(h_.size()); }

private:
  std::vector<double> h_;
  std::vector<double> hazard_; // -log P(tau > j), j = 1..n-1
};

struct RuleEvaluation {
  MomentEstimate rank_moment;         // E[R_tau^p]
  MomentEstimate scaled_value_moment; // n^p E[X_tau^p]
  std::int64_t n = 0;
  double p = 1.0;
  std::int64_t trials = 0;
};

enum class EpisodeMode { Auto, FullSample };

/// Both moments come from the same episodes. Auto uses MemorylessSampler for
/// rules that expose thresholds.
RuleEvaluation evaluate_rule(const StoppingRule& rule, std::int64_t n, double p, std::int64_t trials,
                             const ParallelConfig& parallel, EpisodeMode mode = EpisodeMode::Auto);

RuleEvaluation evaluate_oracle(const OracleRule& rule, std::int64_t n, double p, std::int64_t trials,
                               const ParallelConfig& parallel);

// ---------------------------------------------------------------------------
// Dynamic programming

struct RelativeRankDP {
  RulePtr rule;
  double value = 0.0;                // minimal expected rank over rank-only rules
  std::vector<std::int64_t> cutoffs; // stop at j iff relative rank <= cutoffs[j-1]
};

/// Backward induction over (j, relative rank); stopping with relative rank r
/// at step j costs r (n + 1) / (j + 1) in expectation.
RelativeRankDP dp_relative_rank(std::int64_t n);

/// Just the value, O(n).
double relative_rank_value(std::int64_t n);

struct FullInfoDP {
  RulePtr rule;
  double value = 0.0;
  /// Step-1 threshold: stop at j = 1 iff X_1 <= first_step_threshold.
  double first_step_threshold = 0.0;
  std::int64_t grid_size = 0;
};

/// Discretized full-information backward induction for n <= 3 (midpoint
/// quadrature over each unobserved value). Throws for n > 3.
FullInfoDP dp_full_info(std::int64_t n, std::int64_t grid_size);

// ---------------------------------------------------------------------------
// Derivative-free search over the memoryless family

struct PatternSearchOptions {
  MemorylessTheta start{2.0, 1.0, 0.0};
  MemorylessTheta step{0.5, 0.5, 0.5};
  std::array<bool, 3> frozen{false, false, false};
  std::int64_t budget = 60;   // rule evaluations
  double min_step = 1e-3;
};

struct SearchTrace {
  MemorylessTheta theta;
  double objective;
};

struct PatternSearchResult {
  MemorylessTheta theta{};
  RuleEvaluation evaluation;
  std::int64_t evaluations = 0;
  bool plateau = false; // every step shrank below min_step without improvement
  std::vector<SearchTrace> trace;
};

/// Compass search on E[R^p]: each sweep tries +step and -step along every
/// free axis in order, moving to the first improvement; a sweep with no
/// improvement halves all steps. All candidates share `parallel`, hence the
/// same random numbers.
PatternSearchResult optimize_memoryless(std::int64_t n, double p, std::int64_t trials,
                                        const ParallelConfig& parallel,
                                        const PatternSearchOptions& options = {});

} // namespace ranklab
