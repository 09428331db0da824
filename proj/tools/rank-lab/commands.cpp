#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "csv.hpp"
#include "ranklab/bounds.hpp"
#include "ranklab/dist.hpp"
#include "ranklab/orderstat.hpp"
#include "ranklab/poisson.hpp"
#include "ranklab/stopping.hpp"
#include "ranklab/walk.hpp"

namespace ranklab::cli {
namespace {

void usage(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void forbid(const Common& c, std::initializer_list<const char*> names, const std::string& context) {
  for (const char* n : names)
    usage(!c.given.count(n), "--" + std::string(n) + " does not apply " + context);
}

std::string pm(const MomentEstimate& e) {
  std::ostringstream os;
  os.precision(6);
  os << e.mean << " +- " << e.std_error;
  return os.str();
}

MemorylessTheta parse_theta(const std::string& text) {
  const auto v = parse_reals(text, "--theta");
  usage(v.size() == 3, "--theta needs three comma-separated values");
  return {v[0], v[1], v[2]};
}

} // namespace

Outcome run_mlambda(const MlambdaArgs& a, const Common& c) {
  const auto spec = DistributionSpec::parse(a.dist);
  usage(a.p > 0.0, "--p must be positive");
  usage(a.samples >= 1, "--samples must be at least 1");
  usage(a.hard_cap >= 1, "--hard-cap must be at least 1");
  WalkControl ctl;
  ctl.margin = a.margin;
  ctl.hard_cap = a.hard_cap;
  ctl.far_field = a.far_field;

  const auto samples = sample_suprema(spec, a.lambda, a.samples, ctl, c.parallel());
  CsvWriter csv(c.out, {"sample_index", "value", "argmax_index", "stop_reason"});
  for (std::size_t i = 0; i < samples.size(); ++i)
    csv.row({number(static_cast<std::int64_t>(i)), number(samples[i].value), number(samples[i].argmax_index),
             to_string(samples[i].stop_reason)});
  csv.close();

  const auto m = moment_of(samples, a.p);
  std::ostringstream os;
  os.precision(6);
  os << "mlambda dist=" << spec.to_string() << " lambda=" << a.lambda << " samples=" << a.samples << "\n";
  os << "E M^" << a.p << " = " << pm(m.estimate) << "\n";
  os << "hard_cap_fraction = " << m.hard_cap_fraction << (m.unreliable ? " (unreliable)" : "") << "\n";
  if (a.tail) {
    std::vector<double> values;
    for (const auto& s : samples) values.push_back(s.value);
    os << "tail_exponent = " << fit_tail_exponent(values) << "\n";
  }
  if (a.verdict) {
    std::vector<double> powered;
    powered.reserve(samples.size());
    for (const auto& s : samples) powered.push_back(std::pow(s.value, a.p));
    const auto v = classify_finiteness(subsample_curve(powered));
    os << "verdict,slope,p,lambda,dist\n"
       << to_string(v.verdict) << ',' << number(v.growth_slope) << ',' << number(a.p) << ',' << number(a.lambda)
       << ',' << csv_field(spec.to_string()) << "\n";
  }
  return {0, os.str()};
}

Outcome run_an_prob(const AnProbArgs& a, const Common& c) {
  const auto ns = parse_counts(a.n, "--n");
  const auto eps = parse_reals(a.eps, "--eps");
  CsvWriter csv(c.out, {"n", "epsilon", "p_hat", "std_err"});
  std::ostringstream os;
  os.precision(6);
  std::uint64_t block = 0;
  for (auto n : ns)
    for (double e : eps) {
      ParallelConfig pc = c.parallel();
      pc.stream_base = block++ << 32;
      const auto est = prob_An(n, e, a.trials, pc);
      csv.row({number(n), number(e), number(est.mean), number(est.std_error)});
      os << "P(A_n) n=" << n << " eps=" << e << " : " << pm(est) << "\n";
    }
  csv.close();
  return {0, os.str()};
}

namespace {

struct ChosenRule {
  RulePtr rule;
  OraclePtr oracle;
};

ChosenRule choose_rule(const RobbinsArgs& a, const Common& c, std::int64_t n, const MemorylessTheta& theta) {
  if (a.rule == "memoryless") {
    forbid(c, {"index", "prob"}, "to --rule memoryless");
    return {memoryless_family_rule(theta), nullptr};
  }
  usage(!a.optimize, "--optimize searches the memoryless family only");
  if (a.rule == "fixed") {
    forbid(c, {"theta", "prob"}, "to --rule fixed");
    return {fixed_index_rule(a.index), nullptr};
  }
  if (a.rule == "relrank") {
    forbid(c, {"theta", "prob", "index"}, "to --rule relrank");
    return {dp_relative_rank(n).rule, nullptr};
  }
  if (a.rule == "oracle-min") {
    forbid(c, {"theta", "index", "mode"}, "to --rule oracle-min");
    return {nullptr, oracle_min_or_uniform(a.prob)};
  }
  if (a.rule == "oracle-geom") {
    forbid(c, {"theta", "index", "mode"}, "to --rule oracle-geom");
    return {nullptr, oracle_geometric_rank(a.prob)};
  }
  throw std::invalid_argument("unknown --rule '" + a.rule + "'");
}

std::vector<std::string> evaluation_row(std::int64_t n, double p, const std::string& id, const RuleEvaluation& ev,
                                        std::uint64_t seed) {
  return {number(n),
          number(p),
          id,
          number(ev.rank_moment.mean),
          number(ev.rank_moment.std_error),
          number(ev.scaled_value_moment.mean),
          number(ev.scaled_value_moment.std_error),
          number(ev.trials),
          std::to_string(seed)};
}

CsvWriter evaluation_csv(const std::string& path) {
  return CsvWriter(path, {"n", "p", "rule_id", "rank_moment", "rank_se", "scaled_value_moment", "scaled_value_se",
                          "trials", "seed"});
}

} // namespace

Outcome run_robbins(const RobbinsArgs& a, const Common& c) {
  const auto ns = parse_counts(a.n, "--n");
  usage(!ns.empty(), "--n needs at least one value");
  usage(a.mode == "auto" || a.mode == "full", "--mode must be auto or full");
  const EpisodeMode mode = a.mode == "auto" ? EpisodeMode::Auto : EpisodeMode::FullSample;
  if (!a.optimize) forbid(c, {"search-n", "search-trials", "budget"}, "without --optimize");

  std::ostringstream os;
  os.precision(6);
  MemorylessTheta theta = parse_theta(a.theta);
  if (a.optimize) {
    usage(a.rule == "memoryless", "--optimize searches the memoryless family only");
    PatternSearchOptions opt;
    opt.start = theta;
    opt.budget = a.budget;
    const std::int64_t sn = a.search_n > 0 ? a.search_n : ns.front();
    const std::int64_t st = a.search_trials > 0 ? a.search_trials : a.trials;
    ParallelConfig pc = c.parallel();
    pc.stream_base = std::uint64_t{1} << 48;
    const auto res = optimize_memoryless(sn, a.p, st, pc, opt);
    theta = res.theta;
    os << "search n=" << sn << " trials=" << st << " evaluations=" << res.evaluations
       << (res.plateau ? " (plateau)" : "") << "\n";
    os << "theta* = " << number(theta[0]) << "," << number(theta[1]) << "," << number(theta[2])
       << "  E R^p at search = " << pm(res.evaluation.rank_moment) << "\n";
  }

  CsvWriter csv = evaluation_csv(c.out);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto n = ns[i];
    ParallelConfig pc = c.parallel();
    pc.stream_base = static_cast<std::uint64_t>(i) << 32;
    const ChosenRule chosen = choose_rule(a, c, n, theta);
    RuleEvaluation ev;
    std::string id;
    if (chosen.rule) {
      ev = evaluate_rule(*chosen.rule, n, a.p, a.trials, pc, mode);
      id = chosen.rule->id();
    } else {
      ev = evaluate_oracle(*chosen.oracle, n, a.p, a.trials, pc);
      id = chosen.oracle->id();
    }
    csv.row(evaluation_row(n, a.p, id, ev, c.seed));
    os << id << " n=" << n << " : E R^p = " << pm(ev.rank_moment) << ", n^p E X^p = " << pm(ev.scaled_value_moment)
       << "\n";
  }
  csv.close();
  return {0, os.str()};
}

Outcome run_dp_rank(const DpRankArgs& a, const Common& c) {
  const auto ns = parse_counts(a.n, "--n");
  usage(a.trials >= 0, "--trials must be >= 0");
  CsvWriter csv = evaluation_csv(c.out);
  std::ostringstream os;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto n = ns[i];
    usage(n >= 1, "--n must be at least 1");
    const auto dp = dp_relative_rank(n);
    csv.row({number(n), "1", dp.rule->id(), number(dp.value), "0", "", "", "0", ""});
    os << "n=" << n << " value=" << number(dp.value) << "\n";
    if (a.trials > 0) {
      ParallelConfig pc = c.parallel();
      pc.stream_base = static_cast<std::uint64_t>(i) << 32;
      const auto ev = evaluate_rule(*dp.rule, n, 1.0, a.trials, pc);
      csv.row(evaluation_row(n, 1.0, dp.rule->id(), ev, c.seed));
      os << "  simulated: E R = " << pm(ev.rank_moment) << "\n";
    }
  }
  csv.close();
  return {0, os.str()};
}

Outcome run_dp_full(const DpFullArgs& a, const Common& c) {
  usage(a.n >= 1 && a.n <= 3, "dp-full supports n in {1,2,3}; use robbins with a rule family for larger n");
  usage(a.trials >= 0, "--trials must be >= 0");
  const auto dp = dp_full_info(a.n, a.grid);
  CsvWriter csv = evaluation_csv(c.out);
  csv.row({number(a.n), "1", dp.rule->id(), number(dp.value), "0", "", "", "0", ""});
  std::ostringstream os;
  os << "n=" << a.n << " grid=" << a.grid << " value=" << number(dp.value)
     << " first_step_threshold=" << number(dp.first_step_threshold) << "\n";
  if (a.trials > 0) {
    const auto ev = evaluate_rule(*dp.rule, a.n, 1.0, a.trials, c.parallel());
    csv.row(evaluation_row(a.n, 1.0, dp.rule->id(), ev, c.seed));
    os << "  simulated: E R = " << pm(ev.rank_moment) << "\n";
  }
  csv.close();
  return {0, os.str()};
}

Outcome run_poisson(const PoissonArgs& a, const Common& c) {
  std::ostringstream os;
  os.precision(6);
  PoissonRule rule = PoissonRule::parse(a.boundary, a.scap);
  if (!a.tune.empty()) {
    usage(rule.kind() == PoissonRule::Kind::Reciprocal, "--tune applies to recip boundaries");
    ParallelConfig pc = c.parallel();
    pc.stream_base = std::uint64_t{1} << 48;
    const auto tuned = tune_reciprocal(parse_reals(a.tune, "--tune"), a.scap, a.p, a.trials, pc);
    for (const auto& [cval, est] : tuned.grid) os << "  recip:" << cval << " E R^p = " << pm(est) << "\n";
    rule = PoissonRule::reciprocal(tuned.best_c, a.scap);
    os << "best c = " << tuned.best_c << "\n";
  }
  const auto run = run_poisson_rule(rule, a.scap, a.p, a.trials, c.parallel(), true);
  CsvWriter csv(c.out, {"trial", "stopped_t", "stopped_s", "rank", "no_stop_flag"});
  for (std::size_t i = 0; i < run.episodes.size(); ++i) {
    const auto& e = run.episodes[i];
    csv.row({number(static_cast<std::int64_t>(i)), e.stopped ? number(e.stopped_t) : "",
             e.stopped ? number(e.stopped_s) : "", number(e.rank), e.stopped ? "0" : "1"});
  }
  csv.close();
  os << "poisson boundary=" << rule.id() << " s_cap=" << a.scap << " trials=" << a.trials << "\n";
  os << "E R^" << a.p << " = " << pm(run.rank_moment) << "\n";
  os << "no_stop_frequency = " << pm(run.no_stop) << "\n";
  return {0, os.str()};
}

namespace {

std::string cell_params(const CellTally& cell) {
  std::ostringstream os;
  os << "check=" << to_string(cell.kind) << " p=" << number(cell.params.p) << " lambda=" << number(cell.params.lambda);
  if (cell.params.n) os << " n=" << *cell.params.n;
  if (cell.params.epsilon) os << " eps=" << number(*cell.params.epsilon);
  os << " checks=" << cell.checks;
  if (cell.tightest.params.index) os << " tightest_index=" << *cell.tightest.params.index;
  return os.str();
}

} // namespace

Outcome run_verify(const VerifyArgs& a, const Common& c) {
  const auto ps = parse_reals(a.p, "--p");
  for (double p : ps) usage(p > 0.0, "--p values must be positive");
  std::ostringstream os;
  os.precision(6);
  CsvWriter csv(c.out, {"suite", "params", "lhs", "rhs", "slack", "violated"});
  std::int64_t violations = 0;

  if (a.suite == "corollary" || a.suite == "section4") {
    PathwiseSweep sweep;
    if (a.suite == "corollary") {
      forbid(c, {"n", "eps", "theta", "m-samples"}, "to --suite corollary");
      ChainSweepOptions o;
      o.spec = DistributionSpec::parse(a.dist);
      o.lambdas = parse_reals(a.lambda.empty() ? "2" : a.lambda, "--lambda");
      o.ps = ps;
      o.sigma_max = a.sigma_max;
      o.samples = a.trials;
      sweep = sweep_chain(o, c.parallel());
    } else {
      forbid(c, {"sigma-max", "dist", "theta", "m-samples"}, "to --suite section4");
      DecompositionSweepOptions o;
      o.n_grid = parse_counts(a.n.empty() ? "10,100,1000" : a.n, "--n");
      o.lambdas = parse_reals(a.lambda.empty() ? "1.5,2,3" : a.lambda, "--lambda");
      for (double lam : o.lambdas) usage(lam > 1.0, "--lambda must exceed 1 (the Exp(1) mean)");
      o.ps = ps;
      o.epsilons = parse_reals(a.eps, "--eps");
      for (double e : o.epsilons) usage(e > 0.0, "--eps values must be positive");
      o.samples = a.trials;
      sweep = sweep_decomposition(o, c.parallel());
    }
    double worst = HUGE_VAL;
    for (const auto& cell : sweep.cells) {
      const auto& t = cell.tightest;
      csv.row({a.suite, cell_params(cell), number(t.lhs), number(t.rhs), number(t.slack), number(cell.violations)});
      worst = std::min(worst, cell.min_relative_slack);
    }
    violations = sweep.violations();
    os << "suite=" << a.suite << " samples=" << sweep.samples << " cells=" << sweep.cells.size()
       << " checks=" << sweep.checks() << " violations=" << violations << " min_relative_link_slack=" << worst
       << "\n";
  } else if (a.suite == "eq1") {
    forbid(c, {"sigma-max", "dist", "eps"}, "to --suite eq1");
    LimsupOptions o;
    o.n_grid = parse_counts(a.n.empty() ? "1000,10000,100000" : a.n, "--n");
    o.lambdas = parse_reals(a.lambda.empty() ? "1.5,2,3" : a.lambda, "--lambda");
    for (double lam : o.lambdas) usage(lam > 1.0, "--lambda must exceed 1 (the Exp(1) mean)");
    o.trials = a.trials;
    o.m_samples = a.m_samples > 0 ? a.m_samples : a.trials;
    const auto rule = memoryless_family_rule(parse_theta(a.theta));
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      const double p = ps[pi];
      ParallelConfig pc = c.parallel();
      pc.stream_base = static_cast<std::uint64_t>(pi) << 52;
      for (const auto& row : demonstrate_limsup(*rule, p, o, pc)) {
        const auto& r = row.report;
        std::ostringstream params;
        params << "rule=" << rule->id() << " p=" << number(p) << " lambda=" << number(r.params.lambda)
               << " n=" << *r.params.n << " combined_se=" << number(row.combined_se)
               << " outcome=" << to_string(r.outcome);
        csv.row({a.suite, params.str(), number(r.lhs), number(r.rhs), number(r.slack), r.violated ? "1" : "0"});
        violations += r.violated ? 1 : 0;
        os << "p=" << p << " lambda=" << r.params.lambda << " n=" << *r.params.n << " : lhs=" << r.lhs
           << " rhs=" << r.rhs << " (E R^p=" << pm(row.rule.rank_moment) << ", E M^p=" << pm(row.m.estimate)
           << ") " << to_string(r.outcome) << "\n";
      }
    }
    os << "suite=eq1 violations=" << violations << "\n";
  } else {
    throw std::invalid_argument("--suite must be corollary, section4 or eq1");
  }
  csv.close();
  return {violations > 0 ? 1 : 0, os.str()};
}

} // namespace ranklab::cli
