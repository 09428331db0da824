#include "ranklab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ranklab {

void WalkPath::push(double increment) {
  const double prev = partial_sums.empty() ? 0.0 : partial_sums.back();
  increments.push_back(increment);
  partial_sums.push_back(prev + increment);
}

WalkPath WalkPath::from_increments(std::span<const double> increments) {
  WalkPath path;
  path.increments.reserve(increments.size());
  path.partial_sums.reserve(increments.size());
  for (double x : increments) path.push(x);
  return path;
}

const char* to_string(StopReason r) noexcept {
  return r == StopReason::DriftCertificate ? "DriftCertificate" : "HardCap";
}

const char* to_string(Finiteness f) noexcept {
  switch (f) {
  case Finiteness::Finite: return "Finite";
  case Finiteness::Infinite: return "Infinite";
  case Finiteness::Undecided: return "Undecided";
  }
  return "?";
}

void require_negative_drift(const DistributionSpec& spec, double lambda) {
  const auto mu = finite_mean(spec);
  if (!mu)
    throw std::invalid_argument("supremum undefined: " + spec.to_string() + " has infinite mean");
  if (!(lambda > *mu))
    throw std::invalid_argument("lambda must exceed the increment mean (supremum is a.s. infinite otherwise)");
}

double default_margin(const DistributionSpec& spec, double lambda) {
  require_negative_drift(spec, lambda);
  const double gap = lambda - mean(spec);
  const auto sd = finite_stddev(spec);
  const double spread = sd ? *sd : mean(spec);
  return 30.0 / gap * std::max(1.0, spread);
}

namespace {

struct Resolved {
  double margin;
  double burn_in;
};

Resolved resolve(const DistributionSpec& spec, double lambda, const WalkControl& control) {
  require_negative_drift(spec, lambda);
  if (control.hard_cap < 1) throw std::invalid_argument("hard_cap must be at least 1");
  const double margin = control.margin > 0.0 ? control.margin : default_margin(spec, lambda);
  return {margin, 10.0 * margin / (lambda - mean(spec))};
}

// Advances the drifted walk from state (k, drifted) until the certificate or
// the cap fires. Positions are accumulated relative to the starting state so
// that a far-out restart does not lose precision; from the origin the
// arithmetic is exactly S_k - lambda k. `on_step` receives each increment.
template <class OnStep>
SupremumSample run_walk(const DistributionSpec& spec, double lambda, RngStream& rng,
                        const WalkControl& control, const Resolved& r, std::int64_t k,
                        double drifted, SupremumSample best, OnStep&& on_step,
                        double* end_drifted = nullptr) {
  const std::int64_t base_k = k;
  const double base = drifted;
  double rel = 0.0;
  for (;;) {
    const bool certified = best.value - drifted >= r.margin && static_cast<double>(k) >= r.burn_in &&
                           k >= control.min_length;
    if (certified) {
      best.stop_reason = StopReason::DriftCertificate;
      break;
    }
    if (k >= control.hard_cap) {
      best.stop_reason = StopReason::HardCap;
      break;
    }
    const double xi = sample(spec, rng);
    rel += xi;
    ++k;
    on_step(xi);
    drifted = base + (rel - lambda * static_cast<double>(k - base_k));
    if (drifted > best.value) {
      best.value = drifted;
      best.argmax_index = k;
    }
  }
  best.truncated_at = k;
  best.lambda = lambda;
  if (end_drifted) *end_drifted = drifted;
  return best;
}

// Distinct offsets in [1, range], sorted (Floyd's sampling).
std::vector<std::int64_t> distinct_offsets(std::int64_t count, std::int64_t range, RngStream& rng) {
  std::vector<std::int64_t> picked;
  picked.reserve(static_cast<std::size_t>(count));
  for (std::int64_t j = range - count + 1; j <= range; ++j) {
    const auto t = 1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(j));
    const auto v = std::min(t, j);
    if (std::find(picked.begin(), picked.end(), v) == picked.end())
      picked.push_back(v);
    else
      picked.push_back(j);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

struct FarFieldState {
  std::int64_t k;  // steps accounted for
  double drifted;  // S_k - lambda k
  bool resume;     // walk came back within the margin; continue exactly
  bool exhausted;  // step counter overflow guard
};

// Pareto continuation past the drift certificate; see WalkControl.
FarFieldState far_field(const Pareto& law, double lambda, RngStream& rng, const Resolved& r,
                        double tolerance, std::int64_t k, double drifted, SupremumSample& best) {
  const double a = law.alpha;
  const double s = law.scale;
  const double gap = lambda - a * s / (a - 1.0);
  const double sa = std::pow(s, a);
  // E[xi^m ; xi <= c] for Pareto.
  auto partial_moment = [&](double c, double m) {
    if (a == m) return a * sa * std::log(c / s);
    return a * sa * (std::pow(c, m - a) - std::pow(s, m - a)) / (m - a);
  };

  std::int64_t epoch = std::max<std::int64_t>(64, static_cast<std::int64_t>(r.burn_in));
  constexpr std::int64_t kStepLimit = std::int64_t{1} << 61;
  for (;;) {
    const double deficit = best.value - drifted;
    const double escape = sa * std::pow(deficit, 1.0 - a) / ((a - 1.0) * gap);
    if (escape < tolerance) return {k, drifted, false, false};
    if (k > kStepLimit - epoch) return {k, drifted, false, true};

    const double cut = std::max(2.0 * s, 0.5 * deficit);
    const double q = std::pow(s / cut, a);
    const double keep = 1.0 - q;
    const double m1 = partial_moment(cut, 1.0) / keep;
    const double var = std::max(0.0, partial_moment(cut, 2.0) / keep - m1 * m1);
    // Keep the expected number of exact jumps per segment bounded.
    const double affordable = 30.0 / q;
    const std::int64_t span =
        affordable >= static_cast<double>(epoch) ? epoch : std::max<std::int64_t>(1, static_cast<std::int64_t>(affordable));

    const long long big = sample_binomial(span, q, rng);
    std::int64_t prev = 0;
    for (std::int64_t offset : distinct_offsets(big, span, rng)) {
      const auto small = static_cast<double>(offset - 1 - prev);
      if (small > 0.0) drifted += small * (m1 - lambda) + std::sqrt(small * var) * sample_normal(rng);
      drifted += cut * std::pow(rng.uniform(), -1.0 / a) - lambda;
      prev = offset;
      if (drifted > best.value) {
        best.value = drifted;
        best.argmax_index = k + offset;
      }
      if (best.value - drifted < r.margin) return {k + offset, drifted, true, false};
    }
    const auto small = static_cast<double>(span - prev);
    if (small > 0.0) drifted += small * (m1 - lambda) + std::sqrt(small * var) * sample_normal(rng);
    k += span;
    if (span == epoch) epoch *= 2;
  }
}

} // namespace

SupremumSample simulate_supremum(const DistributionSpec& spec, double lambda, RngStream& rng,
                                 const WalkControl& control) {
  const Resolved r = resolve(spec, lambda, control);
  auto no_op = [](double) {};
  double drifted = 0.0;
  SupremumSample best = run_walk(spec, lambda, rng, control, r, 0, 0.0, SupremumSample{}, no_op, &drifted);
  const auto* law = std::get_if<Pareto>(&spec.family());
  if (!control.far_field || law == nullptr) return best;

  while (best.stop_reason == StopReason::DriftCertificate) {
    const FarFieldState st =
        far_field(*law, lambda, rng, r, control.far_field_tolerance, best.truncated_at, drifted, best);
    best.truncated_at = st.k;
    if (st.exhausted) {
      best.stop_reason = StopReason::HardCap;
      break;
    }
    if (!st.resume) break;
    WalkControl resumed = control;
    resumed.hard_cap = st.k + control.hard_cap;
    best = run_walk(spec, lambda, rng, resumed, r, st.k, st.drifted, best, no_op, &drifted);
  }
  return best;
}

WalkDraw simulate_walk(const DistributionSpec& spec, double lambda, RngStream& rng,
                       const WalkControl& control) {
  WalkDraw draw;
  draw.supremum = extend_to_certificate(draw.path, spec, lambda, rng, control);
  return draw;
}

SupremumSample supremum_of(const WalkPath& path, double lambda) {
  SupremumSample best;
  best.lambda = lambda;
  for (std::int64_t k = 1; k <= path.length(); ++k) {
    const double drifted = path.partial_sums[static_cast<std::size_t>(k - 1)] - lambda * static_cast<double>(k);
    if (drifted > best.value) {
      best.value = drifted;
      best.argmax_index = k;
    }
  }
  best.truncated_at = path.length();
  return best;
}

SupremumSample extend_to_certificate(WalkPath& path, const DistributionSpec& spec, double lambda,
                                     RngStream& rng, const WalkControl& control) {
  const Resolved r = resolve(spec, lambda, control);
  const SupremumSample prefix = supremum_of(path, lambda);
  const std::int64_t k = path.length();
  const double drifted = path.sum_at(k) - lambda * static_cast<double>(k);
  const SupremumSample walked =
      run_walk(spec, lambda, rng, control, r, k, drifted, prefix, [&](double xi) { path.push(xi); });
  // Re-evaluate on the stored partial sums so the result is exactly the
  // supremum of the retained trajectory.
  SupremumSample out = supremum_of(path, lambda);
  out.stop_reason = walked.stop_reason;
  return out;
}

std::vector<SupremumSample> sample_suprema(const DistributionSpec& spec, double lambda,
                                           std::int64_t n_samples, const WalkControl& control,
                                           const ParallelConfig& parallel) {
  resolve(spec, lambda, control);
  auto chunks = run_chunks(n_samples, parallel, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
    RngStream rng(parallel.seed, parallel.stream_base + static_cast<std::uint64_t>(chunk));
    std::vector<SupremumSample> out;
    out.reserve(static_cast<std::size_t>(end - begin));
    for (std::int64_t i = begin; i < end; ++i) out.push_back(simulate_supremum(spec, lambda, rng, control));
    return out;
  });
  std::vector<SupremumSample> all;
  all.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, n_samples)));
  for (auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  return all;
}

SupremumMoment moment_of(std::span<const SupremumSample> samples, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("moment order p must be positive");
  Accumulator acc;
  std::int64_t capped = 0;
  for (const auto& s : samples) {
    acc.push(std::pow(s.value, p));
    if (s.stop_reason == StopReason::HardCap) ++capped;
  }
  SupremumMoment out;
  out.estimate = acc.estimate(p);
  out.hard_cap_fraction = samples.empty() ? 0.0 : static_cast<double>(capped) / static_cast<double>(samples.size());
  out.unreliable = out.hard_cap_fraction > 0.01;
  return out;
}

SupremumMoment estimate_moment_M(const DistributionSpec& spec, double lambda, double p,
                                 std::int64_t n_samples, const ParallelConfig& parallel,
                                 const WalkControl& control) {
  const auto samples = sample_suprema(spec, lambda, n_samples, control, parallel);
  return moment_of(samples, p);
}

std::vector<CurvePoint> subsample_curve(std::span<const double> values, int points,
                                        std::int64_t min_size, std::int64_t min_blocks) {
  const auto n = static_cast<std::int64_t>(values.size());
  if (points < 2) throw std::invalid_argument("subsample_curve needs at least two points");
  if (min_blocks < 1) throw std::invalid_argument("subsample_curve: min_blocks must be positive");
  const std::int64_t max_size = n / min_blocks;
  if (min_size < 1 || min_size >= max_size)
    throw std::invalid_argument("subsample_curve: too few samples for the requested size range");
  std::vector<CurvePoint> curve;
  const double lo = std::log(static_cast<double>(min_size));
  const double hi = std::log(static_cast<double>(max_size));
  std::vector<double> block_means;
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    const auto m = std::clamp<std::int64_t>(std::llround(std::exp(lo + t * (hi - lo))), 1, max_size);
    if (!curve.empty() && curve.back().sample_size == m) continue;
    const std::int64_t blocks = n / m;
    block_means.assign(static_cast<std::size_t>(blocks), 0.0);
    for (std::int64_t b = 0; b < blocks; ++b) {
      double s = 0.0;
      for (std::int64_t j = b * m; j < (b + 1) * m; ++j) s += values[static_cast<std::size_t>(j)];
      block_means[static_cast<std::size_t>(b)] = s / static_cast<double>(m);
    }
    // 0.9 quantile by the nearest-rank rule.
    const auto rank = static_cast<std::int64_t>(std::ceil(0.9 * static_cast<double>(blocks))) - 1;
    auto it = block_means.begin() + std::clamp<std::int64_t>(rank, 0, blocks - 1);
    std::nth_element(block_means.begin(), it, block_means.end());
    curve.push_back({m, *it});
  }
  return curve;
}

FinitenessVerdict classify_finiteness(std::span<const CurvePoint> curve,
                                      const ClassifierThresholds& thresholds) {
  if (curve.size() < 8) throw std::invalid_argument("classify_finiteness needs at least 8 curve points");
  FinitenessVerdict out;
  out.subsample_curve.assign(curve.begin(), curve.end());
  const bool all_zero = std::all_of(curve.begin(), curve.end(), [](const CurvePoint& c) { return c.running_moment == 0.0; });
  if (all_zero) {
    out.verdict = Finiteness::Finite;
    out.growth_slope = 0.0;
    return out;
  }
  std::vector<double> x, y;
  for (const auto& c : curve) {
    if (c.running_moment <= 0.0) continue;
    x.push_back(std::log(static_cast<double>(c.sample_size)));
    y.push_back(std::log(c.running_moment));
  }
  if (x.size() < 2) {
    out.verdict = Finiteness::Undecided;
    return out;
  }
  out.growth_slope = fit_line(x, y).slope;
  if (out.growth_slope <= thresholds.finite_below)
    out.verdict = Finiteness::Finite;
  else if (out.growth_slope >= thresholds.infinite_above)
    out.verdict = Finiteness::Infinite;
  else
    out.verdict = Finiteness::Undecided;
  return out;
}

double fit_tail_exponent(std::span<const double> values, double q_lo, double q_hi) {
  if (!(0.0 < q_lo && q_lo < q_hi && q_hi < 1.0))
    throw std::invalid_argument("fit_tail_exponent: need 0 < q_lo < q_hi < 1");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  const auto first = static_cast<std::size_t>(std::floor(q_lo * n));
  const auto last = static_cast<std::size_t>(std::floor(q_hi * n));
  if (last <= first + 1) throw std::invalid_argument("fit_tail_exponent: too few samples in the band");
  std::vector<double> x, y;
  x.reserve(last - first);
  y.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) {
    x.push_back(sorted[i]);
    y.push_back(std::log((n - static_cast<double>(i)) / n));
  }
  return -fit_line(x, y).slope;
}

} // namespace ranklab
