#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranklab/orderstat.hpp"
#include "ranklab/stats.hpp"
#include "ranklab/stopping.hpp"
#include "ranklab/walk.hpp"

namespace ranklab {

/// max(2^(p-1), 1), the constant in (a + b)^p <= c_p (a^p + b^p).
double c_p(double p);

enum class BoundKind { CorollaryChain, DecompositionPathwise, DecompositionAggregate, LimsupDemonstration };
const char* to_string(BoundKind k) noexcept;

enum class BoundOutcome { Holds, Violated, Undecided };
const char* to_string(BoundOutcome o) noexcept;

struct BoundParams {
  double p = 1.0;
  double lambda = 0.0;
  std::optional<double> epsilon;
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> index; // sigma or k
};

/// lhs <= mid <= rhs where a middle link exists. slack = rhs - lhs;
/// min_link_slack is the smallest slack over the individual links.
struct BoundReport {
  BoundKind kind = BoundKind::CorollaryChain;
  BoundParams params;
  double lhs = 0.0;
  std::optional<double> mid;
  double rhs = 0.0;
  double slack = 0.0;
  double min_link_slack = 0.0;
  bool violated = false;
  BoundOutcome outcome = BoundOutcome::Holds;
};

/// Relative floating-point allowance: a link a <= b fails only when
/// b - a < -relative_noise * max(|a|, |b|).
inline constexpr double relative_noise = 1e-12;

bool link_fails(double lhs, double rhs) noexcept;

/// S_sigma^p <= (M + lambda sigma)^p <= c_p (M^p + lambda^p sigma^p) on one
/// path. Throws std::invalid_argument when M is not the supremum of `path`
/// at M.lambda or sigma is outside [0, path.length()].
BoundReport check_corollary_chain(const WalkPath& path, const SupremumSample& M, std::int64_t sigma, double p);

/// Same checks for several (sigma, p) pairs, validating M once.
std::vector<BoundReport> check_corollary_chain(const WalkPath& path, const SupremumSample& M,
                                               std::span<const std::int64_t> sigmas, std::span<const double> ps);

/// Order statistics and walk suprema built from one Exp(1) increment stream:
/// Y_k = S_k / S_n uses the first n increments of `path`.
struct CoupledSample {
  OrderStatSample order_stats;
  WalkPath path;
  std::vector<SupremumSample> suprema; // one per lambda, each over the whole path
};

/// Draws n Exp(1) increments, then extends the walk until the certificate of
/// the smallest lambda fires. Every lambda must exceed 1.
CoupledSample draw_coupled(std::int64_t n, std::span<const double> lambdas, RngStream& rng,
                           const WalkControl& control = {});

/// Assembles a CoupledSample from parts, rejecting inputs that do not share
/// the increment stream or whose suprema do not belong to `path`.
CoupledSample couple(OrderStatSample order_stats, WalkPath path, std::vector<SupremumSample> suprema);

/// n^p Y_k^p <= n^p 1_{A_n} + c_p (1+eps)^p (M^p + lambda^p k^p), with the
/// intermediate n^p Y_k^p <= (1+eps)^p S_k^p checked on the complement of
/// A_n. `which` picks the supremum (and so lambda) inside the sample.
BoundReport check_decomposition(const CoupledSample& sample, std::size_t which, std::int64_t k, double p,
                                double epsilon);

/// Violation tally for one parameter cell of a pathwise sweep. `tightest`
/// is the check with the smallest relative link slack.
struct CellTally {
  BoundKind kind = BoundKind::CorollaryChain;
  BoundParams params;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  double min_relative_slack = 0.0;
  BoundReport tightest;

  void add(const BoundReport& r);
  void merge(const CellTally& other);
};

struct PathwiseSweep {
  std::vector<CellTally> cells;
  std::int64_t samples = 0;
  std::int64_t checks() const;
  std::int64_t violations() const;
};

/// Chain checks on independent walks: sigma is drawn uniformly from
/// 1..sigma_max (the walk is kept at least that long). Cells are (lambda, p);
/// one walk per sample serves every lambda.
struct ChainSweepOptions {
  DistributionSpec spec = DistributionSpec::exponential(1.0);
  std::vector<double> lambdas{2.0};
  std::vector<double> ps{0.5, 1.0, 2.0, 3.0};
  std::int64_t sigma_max = 100;
  std::int64_t samples = 100000;
  WalkControl control;
};
PathwiseSweep sweep_chain(const ChainSweepOptions& options, const ParallelConfig& parallel);

/// Coupled samples for each n: every sample is checked at
/// k in {1, ceil(n/10), ceil(n/2), n, uniform on 1..n} for the decomposition
/// (cells n, lambda, p, eps) and for the chain with sigma = k (cells n,
/// lambda, p).
struct DecompositionSweepOptions {
  std::vector<std::int64_t> n_grid{10, 100, 1000};
  std::vector<double> lambdas{1.5, 2.0, 3.0};
  std::vector<double> ps{0.5, 1.0, 2.0, 3.0};
  std::vector<double> epsilons{0.05, 0.1};
  std::int64_t samples = 100000; // per n
  WalkControl control;
};
PathwiseSweep sweep_decomposition(const DecompositionSweepOptions& options, const ParallelConfig& parallel);

/// Aggregate comparison of n^p E[X_tau^p] against
/// c_p lambda^p E[R_tau^p] + c_p E[M^p] for Exp(1) increments.
struct LimsupOptions {
  std::vector<std::int64_t> n_grid{1000, 10000, 100000};
  std::vector<double> lambdas{1.5, 2.0, 3.0};
  std::int64_t trials = 200000;   // stopping episodes per n
  std::int64_t m_samples = 200000; // suprema per lambda
  double se_multiple = 4.0;
  /// A log-log slope of E[R^p] against n above this marks the family as
  /// exploding, and the comparison as Undecided.
  double explode_slope = 0.5;
};

struct LimsupRow {
  BoundReport report;
  RuleEvaluation rule;
  SupremumMoment m;
  double combined_se = 0.0;
};

std::vector<LimsupRow> demonstrate_limsup(const StoppingRule& rule, double p, const LimsupOptions& options,
                                          const ParallelConfig& parallel);

} // namespace ranklab
