#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ranklab/dist.hpp"
#include "ranklab/rng.hpp"
#include "ranklab/stats.hpp"

namespace ranklab {

/// Realized trajectory S_k = xi_1 + ... + xi_k, k = 1..K. S_0 = 0 is implicit.
struct WalkPath {
  std::vector<double> increments;
  std::vector<double> partial_sums;

  std::int64_t length() const noexcept { return static_cast<std::int64_t>(partial_sums.size()); }
  /// S_k for 0 <= k <= length().
  double sum_at(std::int64_t k) const { return k == 0 ? 0.0 : partial_sums.at(static_cast<std::size_t>(k - 1)); }

  void push(double increment);
  static WalkPath from_increments(std::span<const double> increments);
};

enum class StopReason { DriftCertificate, HardCap };
const char* to_string(StopReason r) noexcept;

/// One realization of the drifted supremum M = sup_{k>=0} (S_k - lambda k),
/// evaluated over k = 0..truncated_at.
struct SupremumSample {
  double value = 0.0;
  std::int64_t argmax_index = 0;
  double lambda = 0.0;
  std::int64_t truncated_at = 0;
  StopReason stop_reason = StopReason::DriftCertificate;
};

/// Truncation controls for the supremum simulation.
///
/// The walk stops at step k once S_k - lambda k has fallen at least `margin`
/// below the running maximum and k >= 10 margin / (lambda - mu), or when k
/// reaches `hard_cap`.
///
/// For Pareto increments the certificate alone misses the single-big-jump
/// contributions that make up the polynomial tail of M, so simulate_supremum
/// continues past the certificate in doubling epochs: jumps above half the
/// current deficit are drawn exactly, the smaller ones are aggregated per
/// segment by their conditional mean and variance (normal approximation).
/// The continuation ends once the probability of any further improvement,
/// bounded by (1/(lambda - mu)) * integral_d^inf P(xi > y) dy, drops below
/// far_field_tolerance. Trajectory-retaining calls never use it.
struct WalkControl {
  double margin = 0.0; // <= 0 selects default_margin()
  std::int64_t hard_cap = 10'000'000;
  std::int64_t min_length = 0; // keep walking at least this many steps
  bool far_field = true;       // only affects Pareto increments
  double far_field_tolerance = 1e-9;
};

/// 30 / (lambda - mu) * max(1, spread), where spread is the standard deviation
/// of xi, or its mean when the variance is infinite.
double default_margin(const DistributionSpec& spec, double lambda);

/// Throws std::invalid_argument unless lambda > mean(spec).
void require_negative_drift(const DistributionSpec& spec, double lambda);

SupremumSample simulate_supremum(const DistributionSpec& spec, double lambda, RngStream& rng,
                                 const WalkControl& control = {});

/// Same walk as simulate_supremum, retaining the trajectory.
struct WalkDraw {
  WalkPath path;
  SupremumSample supremum;
};
WalkDraw simulate_walk(const DistributionSpec& spec, double lambda, RngStream& rng,
                       const WalkControl& control = {});

/// Supremum of S_k - lambda k over k = 0..path.length(), with the
/// DriftCertificate tag (the caller owns the truncation decision).
SupremumSample supremum_of(const WalkPath& path, double lambda);

/// Continues `path` with fresh increments from `rng` until the certificate
/// fires (or the cap is hit) and returns the supremum over the whole path.
/// Used by coupled constructions that already hold a prefix of increments.
SupremumSample extend_to_certificate(WalkPath& path, const DistributionSpec& spec, double lambda,
                                     RngStream& rng, const WalkControl& control);

/// Independent suprema, sample i drawn from stream (seed, stream_base + chunk).
std::vector<SupremumSample> sample_suprema(const DistributionSpec& spec, double lambda,
                                           std::int64_t n_samples, const WalkControl& control,
                                           const ParallelConfig& parallel);

struct SupremumMoment {
  MomentEstimate estimate;
  double hard_cap_fraction = 0.0;
  bool unreliable = false; // more than 1% of samples exited via HardCap
};

SupremumMoment moment_of(std::span<const SupremumSample> samples, double p);

/// Monte Carlo estimate of E M^p.
SupremumMoment estimate_moment_M(const DistributionSpec& spec, double lambda, double p,
                                 std::int64_t n_samples, const ParallelConfig& parallel,
                                 const WalkControl& control = {});

// ---------------------------------------------------------------------------
// Moment-finiteness diagnostic

enum class Finiteness { Finite, Infinite, Undecided };
const char* to_string(Finiteness f) noexcept;

struct CurvePoint {
  std::int64_t sample_size;
  double running_moment;
};

struct FinitenessVerdict {
  Finiteness verdict = Finiteness::Undecided;
  double growth_slope = 0.0;
  std::vector<CurvePoint> subsample_curve;
};

/// Log-log slope thresholds: slope <= finite_below => Finite,
/// slope >= infinite_above => Infinite.
struct ClassifierThresholds {
  double finite_below = 0.05;
  double infinite_above = 0.15;
};

/// Growth curve of the empirical mean of `values` (already raised to the
/// power p) at `points` log-spaced sample sizes between min_size and
/// values.size() / min_blocks. At size m the running moment is the 0.9
/// quantile, over the values.size()/m disjoint blocks of length m, of the
/// block means. For a right-skewed law with finite mean this quantile settles
/// onto the mean from above; with an infinite mean it grows like a power of m.
std::vector<CurvePoint> subsample_curve(std::span<const double> values, int points = 12,
                                        std::int64_t min_size = 100, std::int64_t min_blocks = 32);

/// Regress log(running moment) on log(sample size) and threshold the slope.
/// Requires at least 8 points; an all-zero curve is Finite with slope 0.
FinitenessVerdict classify_finiteness(std::span<const CurvePoint> curve,
                                      const ClassifierThresholds& thresholds = {});

/// Least-squares fit of log empirical survival against value over the
/// quantile band [q_lo, q_hi]; returns the decay rate (minus the slope).
double fit_tail_exponent(std::span<const double> values, double q_lo = 0.9, double q_hi = 0.999);

} // namespace ranklab
