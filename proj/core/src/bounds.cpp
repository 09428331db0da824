#include "ranklab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ranklab/dist.hpp"

namespace ranklab {

double c_p(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("c_p needs p > 0");
  return std::max(std::pow(2.0, p - 1.0), 1.0);
}

const char* to_string(BoundKind k) noexcept {
  switch (k) {
  case BoundKind::CorollaryChain: return "corollary";
  case BoundKind::DecompositionPathwise: return "decomposition";
  case BoundKind::DecompositionAggregate: return "decomposition-mean";
  case BoundKind::LimsupDemonstration: return "limsup";
  }
  return "?";
}

const char* to_string(BoundOutcome o) noexcept {
  switch (o) {
  case BoundOutcome::Holds: return "holds";
  case BoundOutcome::Violated: return "violated";
  case BoundOutcome::Undecided: return "undecided";
  }
  return "?";
}

bool link_fails(double lhs, double rhs) noexcept {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return !(rhs - lhs >= -relative_noise * scale);
}

namespace {

void require_supremum_of(const WalkPath& path, const SupremumSample& M) {
  const SupremumSample fresh = supremum_of(path, M.lambda);
  if (fresh.value != M.value || fresh.argmax_index != M.argmax_index)
    throw std::invalid_argument("supremum was not computed from this path at lambda = " + std::to_string(M.lambda));
}

BoundReport chain_unchecked(const WalkPath& path, const SupremumSample& M, std::int64_t sigma, double p) {
  if (sigma < 0 || sigma > path.length()) throw std::invalid_argument("sigma outside the path");
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  const double lam = M.lambda;
  const double s = static_cast<double>(sigma);
  BoundReport r;
  r.kind = BoundKind::CorollaryChain;
  r.params = {p, lam, std::nullopt, std::nullopt, sigma};
  r.lhs = std::pow(path.sum_at(sigma), p);
  r.mid = std::pow(M.value + lam * s, p);
  r.rhs = c_p(p) * (std::pow(M.value, p) + std::pow(lam, p) * std::pow(s, p));
  r.slack = r.rhs - r.lhs;
  r.min_link_slack = std::min(*r.mid - r.lhs, r.rhs - *r.mid);
  r.violated = link_fails(r.lhs, *r.mid) || link_fails(*r.mid, r.rhs);
  r.outcome = r.violated ? BoundOutcome::Violated : BoundOutcome::Holds;
  return r;
}

} // namespace

BoundReport check_corollary_chain(const WalkPath& path, const SupremumSample& M, std::int64_t sigma, double p) {
  require_supremum_of(path, M);
  return chain_unchecked(path, M, sigma, p);
}

std::vector<BoundReport> check_corollary_chain(const WalkPath& path, const SupremumSample& M,
                                               std::span<const std::int64_t> sigmas, std::span<const double> ps) {
  require_supremum_of(path, M);
  std::vector<BoundReport> out;
  out.reserve(sigmas.size() * ps.size());
  for (std::int64_t sigma : sigmas)
    for (double p : ps) out.push_back(chain_unchecked(path, M, sigma, p));
  return out;
}

CoupledSample draw_coupled(std::int64_t n, std::span<const double> lambdas, RngStream& rng,
                           const WalkControl& control) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (lambdas.empty()) throw std::invalid_argument("at least one lambda is required");
  for (double lam : lambdas)
    if (!(lam > 1.0)) throw std::invalid_argument("lambda must exceed the Exp(1) mean");

  CoupledSample out;
  out.path.increments.reserve(static_cast<std::size_t>(n));
  out.path.partial_sums.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.path.push(sample_exp1(rng));
  out.order_stats = order_stats_from_increments(out.path.increments, n, Normalization::PaperSn);

  const double lam_min = *std::min_element(lambdas.begin(), lambdas.end());
  const SupremumSample first =
      extend_to_certificate(out.path, DistributionSpec::exponential(1.0), lam_min, rng, control);
  out.suprema.reserve(lambdas.size());
  for (double lam : lambdas) {
    SupremumSample s = supremum_of(out.path, lam);
    s.stop_reason = first.stop_reason;
    out.suprema.push_back(s);
  }
  return out;
}

CoupledSample couple(OrderStatSample order_stats, WalkPath path, std::vector<SupremumSample> suprema) {
  if (order_stats.normalization != Normalization::PaperSn)
    throw std::invalid_argument("coupling needs Y_k = S_k / S_n");
  const std::int64_t n = order_stats.n;
  if (path.length() < n) throw std::invalid_argument("walk is shorter than the order-statistics sample");
  for (std::int64_t k = 1; k <= n; ++k)
    if (path.sum_at(k) != order_stats.sums[static_cast<std::size_t>(k - 1)])
      throw std::invalid_argument("order statistics and walk do not share increments");
  for (const auto& M : suprema) require_supremum_of(path, M);
  return {std::move(order_stats), std::move(path), std::move(suprema)};
}

BoundReport check_decomposition(const CoupledSample& sample, std::size_t which, std::int64_t k, double p,
                                double epsilon) {
  const OrderStatSample& os = sample.order_stats;
  const std::int64_t n = os.n;
  if (which >= sample.suprema.size()) throw std::invalid_argument("no such supremum in the sample");
  if (k < 1 || k > n) throw std::invalid_argument("k outside 1..n");
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const SupremumSample& M = sample.suprema[which];
  const double lam = M.lambda;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double cp = c_p(p);
  const double grow = std::pow(1.0 + epsilon, p);
  const bool on_A = event_An(os, epsilon).occurred;

  BoundReport r;
  r.kind = BoundKind::DecompositionPathwise;
  r.params = {p, lam, epsilon, n, k};
  r.lhs = std::pow(nd * os.order_stats[static_cast<std::size_t>(k - 1)], p);
  r.rhs = (on_A ? std::pow(nd, p) : 0.0) + cp * grow * (std::pow(M.value, p) + std::pow(lam, p) * std::pow(kd, p));
  r.slack = r.rhs - r.lhs;
  if (on_A) {
    r.min_link_slack = r.slack;
    r.violated = link_fails(r.lhs, r.rhs);
  } else {
    r.mid = grow * std::pow(sample.path.sum_at(k), p);
    r.min_link_slack = std::min(*r.mid - r.lhs, r.rhs - *r.mid);
    r.violated = link_fails(r.lhs, *r.mid) || link_fails(*r.mid, r.rhs);
  }
  r.outcome = r.violated ? BoundOutcome::Violated : BoundOutcome::Holds;
  return r;
}

void CellTally::add(const BoundReport& r) {
  const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), r.mid ? std::abs(*r.mid) : 0.0});
  const double rel = scale > 0.0 ? r.min_link_slack / scale : 0.0;
  if (checks == 0 || rel < min_relative_slack) {
    min_relative_slack = rel;
    tightest = r;
  }
  ++checks;
  violations += r.violated ? 1 : 0;
}

void CellTally::merge(const CellTally& other) {
  if (other.checks == 0) return;
  if (checks == 0 || other.min_relative_slack < min_relative_slack) {
    min_relative_slack = other.min_relative_slack;
    tightest = other.tightest;
  }
  checks += other.checks;
  violations += other.violations;
}

std::int64_t PathwiseSweep::checks() const {
  std::int64_t total = 0;
  for (const auto& c : cells) total += c.checks;
  return total;
}

std::int64_t PathwiseSweep::violations() const {
  std::int64_t total = 0;
  for (const auto& c : cells) total += c.violations;
  return total;
}

namespace {

void merge_into(std::vector<CellTally>& into, const std::vector<CellTally>& part) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i].merge(part[i]);
}

void require_grid(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

} // namespace

PathwiseSweep sweep_chain(const ChainSweepOptions& o, const ParallelConfig& parallel) {
  require_grid(!o.lambdas.empty() && !o.ps.empty(), "chain sweep needs lambdas and p values");
  require_grid(o.sigma_max >= 1 && o.samples >= 1, "chain sweep needs sigma_max >= 1 and samples >= 1");
  for (double lam : o.lambdas) require_negative_drift(o.spec, lam);
  const double lam_min = *std::min_element(o.lambdas.begin(), o.lambdas.end());

  std::vector<CellTally> blank;
  for (double lam : o.lambdas)
    for (double p : o.ps) {
      CellTally c;
      c.kind = BoundKind::CorollaryChain;
      c.params = {p, lam, std::nullopt, std::nullopt, std::nullopt};
      blank.push_back(c);
    }

  auto parts = run_chunks(o.samples, parallel, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
    RngStream rng(parallel.seed, parallel.stream_base + static_cast<std::uint64_t>(chunk));
    std::vector<CellTally> cells = blank;
    WalkControl ctl = o.control;
    ctl.min_length = std::max(ctl.min_length, o.sigma_max);
    for (std::int64_t i = begin; i < end; ++i) {
      auto draw = simulate_walk(o.spec, lam_min, rng, ctl);
      const std::int64_t sigma =
          std::min(o.sigma_max, 1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(o.sigma_max)));
      const std::int64_t sigmas[] = {sigma};
      for (std::size_t li = 0; li < o.lambdas.size(); ++li) {
        const SupremumSample M = o.lambdas[li] == lam_min ? draw.supremum : supremum_of(draw.path, o.lambdas[li]);
        const auto reports = check_corollary_chain(draw.path, M, sigmas, o.ps);
        for (std::size_t pi = 0; pi < o.ps.size(); ++pi) cells[li * o.ps.size() + pi].add(reports[pi]);
      }
    }
    return cells;
  });

  PathwiseSweep out;
  out.cells = blank;
  out.samples = o.samples;
  for (const auto& part : parts) merge_into(out.cells, part);
  return out;
}

PathwiseSweep sweep_decomposition(const DecompositionSweepOptions& o, const ParallelConfig& parallel) {
  require_grid(!o.n_grid.empty() && !o.lambdas.empty() && !o.ps.empty() && !o.epsilons.empty(),
               "decomposition sweep needs n, lambda, p and epsilon values");
  require_grid(o.samples >= 1, "decomposition sweep needs samples >= 1");
  const std::size_t L = o.lambdas.size(), P = o.ps.size(), E = o.epsilons.size();

  PathwiseSweep out;
  out.samples = o.samples * static_cast<std::int64_t>(o.n_grid.size());
  for (std::size_t ni = 0; ni < o.n_grid.size(); ++ni) {
    const std::int64_t n = o.n_grid[ni];
    require_grid(n >= 1, "n must be at least 1");
    std::vector<CellTally> blank;
    for (double lam : o.lambdas)
      for (double p : o.ps) {
        CellTally c;
        c.kind = BoundKind::CorollaryChain;
        c.params = {p, lam, std::nullopt, n, std::nullopt};
        blank.push_back(c);
      }
    for (double lam : o.lambdas)
      for (double p : o.ps)
        for (double eps : o.epsilons) {
          CellTally c;
          c.kind = BoundKind::DecompositionPathwise;
          c.params = {p, lam, eps, n, std::nullopt};
          blank.push_back(c);
        }

    ParallelConfig pc = parallel;
    pc.stream_base = parallel.stream_base + (static_cast<std::uint64_t>(ni) << 40);
    auto parts = run_chunks(o.samples, pc, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
      RngStream rng(pc.seed, pc.stream_base + static_cast<std::uint64_t>(chunk));
      std::vector<CellTally> cells = blank;
      const auto up = [n](std::int64_t d) { return std::max<std::int64_t>(1, (n + d - 1) / d); };
      for (std::int64_t i = begin; i < end; ++i) {
        const CoupledSample cs = draw_coupled(n, o.lambdas, rng, o.control);
        const std::int64_t k_rand = std::min(n, 1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(n)));
        const std::int64_t ks[] = {1, up(10), up(2), n, k_rand};
        for (std::size_t li = 0; li < L; ++li) {
          const auto chain = check_corollary_chain(cs.path, cs.suprema[li], ks, o.ps);
          for (std::size_t r = 0; r < chain.size(); ++r) cells[li * P + r % P].add(chain[r]);
          for (std::int64_t k : ks)
            for (std::size_t pi = 0; pi < P; ++pi)
              for (std::size_t ei = 0; ei < E; ++ei)
                cells[L * P + (li * P + pi) * E + ei].add(check_decomposition(cs, li, k, o.ps[pi], o.epsilons[ei]));
        }
      }
      return cells;
    });
    std::vector<CellTally> merged = blank;
    for (const auto& part : parts) merge_into(merged, part);
    out.cells.insert(out.cells.end(), merged.begin(), merged.end());
  }
  return out;
}

std::vector<LimsupRow> demonstrate_limsup(const StoppingRule& rule, double p, const LimsupOptions& options,
                                          const ParallelConfig& parallel) {
  if (options.n_grid.empty() || options.lambdas.empty()) throw std::invalid_argument("empty n or lambda grid");
  const double cp = c_p(p);
  const auto exp1 = DistributionSpec::exponential(1.0);

  std::vector<SupremumMoment> ms;
  for (std::size_t i = 0; i < options.lambdas.size(); ++i) {
    ParallelConfig pc = parallel;
    pc.stream_base = parallel.stream_base + (std::uint64_t{1} << 40) + (static_cast<std::uint64_t>(i) << 32);
    ms.push_back(estimate_moment_M(exp1, options.lambdas[i], p, options.m_samples, pc));
  }

  std::vector<RuleEvaluation> evals;
  std::vector<double> log_n, log_r;
  for (std::size_t j = 0; j < options.n_grid.size(); ++j) {
    ParallelConfig pc = parallel;
    pc.stream_base = parallel.stream_base + (static_cast<std::uint64_t>(j) << 32);
    evals.push_back(evaluate_rule(rule, options.n_grid[j], p, options.trials, pc));
    log_n.push_back(std::log(static_cast<double>(options.n_grid[j])));
    log_r.push_back(std::log(std::max(evals.back().rank_moment.mean, 1e-300)));
  }
  bool exploding = false;
  if (log_n.size() >= 2) exploding = fit_line(log_n, log_r).slope > options.explode_slope;

  std::vector<LimsupRow> rows;
  for (std::size_t j = 0; j < evals.size(); ++j) {
    for (std::size_t i = 0; i < options.lambdas.size(); ++i) {
      const double lam = options.lambdas[i];
      const RuleEvaluation& ev = evals[j];
      const double lp = std::pow(lam, p);
      LimsupRow row{{}, ev, ms[i], 0.0};
      BoundReport& r = row.report;
      r.kind = BoundKind::LimsupDemonstration;
      r.params = {p, lam, std::nullopt, ev.n, std::nullopt};
      r.lhs = ev.scaled_value_moment.mean;
      r.rhs = cp * lp * ev.rank_moment.mean + cp * ms[i].estimate.mean;
      r.slack = r.rhs - r.lhs;
      r.min_link_slack = r.slack;
      row.combined_se = std::hypot(ev.scaled_value_moment.std_error, cp * lp * ev.rank_moment.std_error,
                                   cp * ms[i].estimate.std_error);
      const bool beyond = r.lhs - r.rhs > options.se_multiple * row.combined_se;
      if (exploding) {
        r.outcome = BoundOutcome::Undecided;
      } else {
        r.violated = beyond;
        r.outcome = beyond ? BoundOutcome::Violated : BoundOutcome::Holds;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

} // namespace ranklab
