#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"
#include "options.hpp"

using namespace ranklab::cli;

namespace {

struct Subcommand {
  CLI::App* app;
  Common common;
  std::function<Outcome(const Common&)> run;
};

CLI::Option* count_option(CLI::App* sub, const std::string& name, std::int64_t& target, const std::string& help) {
  return sub->add_option(name, target, help)->transform(integer_text());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-lab: random-walk suprema, rank-based stopping and bound checks"};
  app.name("rank-lab");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::unique_ptr<Subcommand>> subs;
  auto make = [&](const std::string& name, const std::string& help) {
    auto s = std::make_unique<Subcommand>();
    s->app = app.add_subcommand(name, help);
    add_common(*s->app, s->common, name + ".csv");
    subs.push_back(std::move(s));
    return subs.back().get();
  };

  MlambdaArgs ml;
  {
    auto* s = make("mlambda", "Monte Carlo of the supremum M of S_k - lambda k");
    auto* a = s->app;
    a->add_option("--dist", ml.dist, "exp:RATE | pareto:ALPHA[:SCALE] | unif | det:VALUE");
    a->add_option("--lambda", ml.lambda, "drift, must exceed the mean")->required();
    a->add_option("--p", ml.p, "moment order");
    count_option(a, "--samples", ml.samples, "number of suprema");
    a->add_option("--margin", ml.margin, "drift-certificate margin (<= 0: automatic)");
    count_option(a, "--hard-cap", ml.hard_cap, "maximum walk length");
    a->add_flag("--no-far-field", "disable the Pareto far-field continuation");
    a->add_flag("--verdict", ml.verdict, "classify E M^p as finite or infinite");
    a->add_flag("--tail", ml.tail, "fit an exponential tail exponent");
    s->run = [&ml, a](const Common& c) {
      MlambdaArgs args = ml;
      args.far_field = !a->get_option("--no-far-field")->as<bool>();
      return run_mlambda(args, c);
    };
  }

  AnProbArgs an;
  {
    auto* s = make("an-prob", "Monte Carlo of P(n / S_n > 1 + eps)");
    s->app->add_option("--n", an.n, "sample sizes, comma separated");
    s->app->add_option("--eps", an.eps, "epsilons, comma separated");
    count_option(s->app, "--trials", an.trials, "trials per cell");
    s->run = [&an](const Common& c) { return run_an_prob(an, c); };
  }

  RobbinsArgs rb;
  {
    auto* s = make("robbins", "Evaluate a stopping rule on uniform samples");
    auto* a = s->app;
    a->add_option("--rule", rb.rule, "memoryless | fixed | relrank | oracle-min | oracle-geom");
    a->add_option("--theta", rb.theta, "memoryless thresholds h(j,n) = t0 / (n - j + t1) + t2 / n");
    count_option(a, "--index", rb.index, "index for --rule fixed");
    a->add_option("--prob", rb.prob, "probability parameter of the oracle rules");
    a->add_option("--n", rb.n, "sample sizes, comma separated");
    a->add_option("--p", rb.p, "rank moment order");
    count_option(a, "--trials", rb.trials, "episodes per n");
    a->add_option("--mode", rb.mode, "auto | full");
    a->add_flag("--optimize", rb.optimize, "pattern search over theta before evaluating");
    count_option(a, "--search-n", rb.search_n, "n used by the search (default: first --n)");
    count_option(a, "--search-trials", rb.search_trials, "episodes per search evaluation (default: --trials)");
    count_option(a, "--budget", rb.budget, "search evaluations");
    s->run = [&rb](const Common& c) { return run_robbins(rb, c); };
  }

  DpRankArgs dr;
  {
    auto* s = make("dp-rank", "Optimal rule among relative-rank rules");
    s->app->add_option("--n", dr.n, "sample sizes, comma separated");
    count_option(s->app, "--trials", dr.trials, "also simulate the induced rule");
    s->run = [&dr](const Common& c) { return run_dp_rank(dr, c); };
  }

  DpFullArgs df;
  {
    auto* s = make("dp-full", "Full-information optimal rule for n <= 3");
    count_option(s->app, "--n", df.n, "sample size (1..3)");
    count_option(s->app, "--grid", df.grid, "quadrature grid size");
    count_option(s->app, "--trials", df.trials, "also simulate the induced rule");
    s->run = [&df](const Common& c) { return run_dp_full(df, c); };
  }

  PoissonArgs po;
  {
    auto* s = make("poisson", "Planar Poisson version of the problem");
    s->app->add_option("--boundary", po.boundary, "zero | const:C | recip:C");
    s->app->add_option("--scap", po.scap, "truncation level of the value axis");
    s->app->add_option("--p", po.p, "rank moment order");
    count_option(s->app, "--trials", po.trials, "episodes");
    s->app->add_option("--tune", po.tune, "grid of recip constants to choose from");
    s->run = [&po](const Common& c) { return run_poisson(po, c); };
  }

  VerifyArgs vf;
  {
    auto* s = make("verify", "Check the pathwise and averaged bounds");
    auto* a = s->app;
    a->add_option("--suite", vf.suite, "corollary | section4 | eq1")->required();
    count_option(a, "--trials", vf.trials, "samples (per n for the n-indexed suites)");
    a->add_option("--p", vf.p, "moment orders, comma separated");
    a->add_option("--lambda", vf.lambda, "drifts, comma separated");
    a->add_option("--eps", vf.eps, "epsilons, comma separated");
    a->add_option("--n", vf.n, "sample sizes, comma separated");
    count_option(a, "--sigma-max", vf.sigma_max, "upper end of the random index (corollary)");
    a->add_option("--dist", vf.dist, "increment law (corollary)");
    a->add_option("--theta", vf.theta, "memoryless rule checked by eq1");
    count_option(a, "--m-samples", vf.m_samples, "suprema used for E M^p (eq1, default: --trials)");
    s->run = [&vf](const Common& c) { return run_verify(vf, c); };
  }

  try {
    const auto args = splice_config(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  for (auto& s : subs) {
    if (!s->app->parsed()) continue;
    for (const CLI::Option* opt : s->app->get_options())
      if (opt->count() > 0 && !opt->get_lnames().empty() && opt->results().back() != opt->get_default_str())
        s->common.given.insert(opt->get_lnames().front());
    try {
      const Outcome outcome = s->run(s->common);
      std::cout << outcome.summary;
      write_text(s->common.out + ".summary.txt", outcome.summary);
      write_text(s->common.out + ".config", config_echo(*s->app));
      return outcome.exit_code;
    } catch (const std::invalid_argument& e) {
      std::cerr << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    }
  }
  return 2;
}
