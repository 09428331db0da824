#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ranklab/stopping.hpp"

using namespace ranklab;

namespace {

bool within(const MomentEstimate& e, double target, double k = 4.0) {
  return std::abs(e.mean - target) <= k * e.std_error + 1e-12;
}

} // namespace

TEST_CASE("rank_of counts smaller values and breaks ties by index") {
  const std::vector<double> v{0.3, 0.1, 0.7, 0.3};
  CHECK(rank_of(v, 1) == 2);
  CHECK(rank_of(v, 2) == 1);
  CHECK(rank_of(v, 3) == 4);
  CHECK(rank_of(v, 4) == 3);
  CHECK_THROWS_AS(rank_of(v, 5), std::out_of_range);
}

TEST_CASE("ranks of an episode form a permutation") {
  gen::Gen g(5);
  for (int t = 0; t < 200; ++t) {
    const auto n = g.integer(1, 40);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = g.real(0, 1);
    std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
    for (std::int64_t j = 1; j <= n; ++j) ++seen[static_cast<std::size_t>(rank_of(v, j))];
    CHECK(std::count(seen.begin() + 1, seen.end(), 1) == n);
  }
}

TEST_CASE("fixed index: first observation") {
  const auto rule = fixed_index_rule(1);
  RngStream rng(1, 0);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> v(8);
    for (auto& x : v) x = rng.uniform();
    const auto o = run_episode_on(*rule, v);
    CHECK(o.tau == 1);
    CHECK(o.x_stopped == v[0]);
    CHECK(o.rank == 1 + std::count_if(v.begin() + 1, v.end(), [&](double x) { return x < v[0]; }));
  }
  for (auto mode : {EpisodeMode::Auto, EpisodeMode::FullSample}) {
    const auto ev = evaluate_rule(*rule, 5, 1.0, 400000, {1, 0, 1, 4096}, mode);
    CHECK(within(ev.rank_moment, 3.0));
    CHECK(within(ev.scaled_value_moment, 2.5));
    const auto ev100 = evaluate_rule(*rule, 100, 1.0, 200000, {2, 0, 1, 4096}, mode);
    CHECK(within(ev100.rank_moment, 50.5));
    CHECK(within(ev100.scaled_value_moment, 50.0));
  }
  CHECK_THROWS_AS(evaluate_rule(*fixed_index_rule(7), 5, 1.0, 10, {}), std::invalid_argument);
}

TEST_CASE("a threshold that never triggers forces the last draw") {
  const auto rule = memoryless_rule([](std::int64_t, std::int64_t) { return 0.0; }, "zero");
  RngStream rng(3, 0);
  CHECK(run_episode(*rule, 5, rng).tau == 5);
  const auto ev = evaluate_rule(*rule, 5, 1.0, 400000, {3, 0, 1, 4096});
  CHECK(within(ev.rank_moment, 3.0));
  CHECK(within(ev.scaled_value_moment, 2.5));
  const auto family = evaluate_rule(*memoryless_family_rule({0.0, 0.0, 0.0}), 101, 1.0, 200000, {4, 0, 1, 4096});
  CHECK(within(family.rank_moment, 51.0));
}

TEST_CASE("decisions depend only on the observed prefix") {
  gen::Gen g(9);
  const std::vector<RulePtr> rules{memoryless_family_rule({2.0, 1.0, 0.5}), dp_relative_rank(12).rule,
                                   fixed_index_rule(4), dp_full_info(3, 200).rule};
  for (int t = 0; t < 500; ++t) {
    const RulePtr& rule = g.pick(rules);
    const std::int64_t n = rule->id().rfind("full", 0) == 0 ? 3 : 12;
    std::vector<double> a(static_cast<std::size_t>(n)), b;
    for (auto& x : a) x = g.real(0, 1);
    b = a;
    const auto j = g.integer(1, n);
    for (auto i = static_cast<std::size_t>(j); i < b.size(); ++i) b[i] = g.real(0, 1);
    for (std::int64_t m = 1; m <= j; ++m)
      CHECK(rule->stop(n, std::span<const double>(a).first(static_cast<std::size_t>(m))) ==
            rule->stop(n, std::span<const double>(b).first(static_cast<std::size_t>(m))));
  }
}

TEST_CASE("exact memoryless sampler agrees with full-sample episodes") {
  for (const MemorylessTheta& theta : {MemorylessTheta{2.0, 1.0, 0.0}, MemorylessTheta{1.9, 1.0, 0.5},
                                       MemorylessTheta{0.5, 3.0, 4.0}}) {
    for (double p : {1.0, 2.0}) {
      const auto rule = memoryless_family_rule(theta);
      const auto a = evaluate_rule(*rule, 200, p, 200000, {5, 0, 1, 4096}, EpisodeMode::Auto);
      const auto b = evaluate_rule(*rule, 200, p, 200000, {6, 0, 1, 4096}, EpisodeMode::FullSample);
      INFO(rule->id() << " p=" << p);
      CHECK(std::abs(a.rank_moment.mean - b.rank_moment.mean) <
            4.0 * std::hypot(a.rank_moment.std_error, b.rank_moment.std_error));
      CHECK(std::abs(a.scaled_value_moment.mean - b.scaled_value_moment.mean) <
            4.0 * std::hypot(a.scaled_value_moment.std_error, b.scaled_value_moment.std_error));
    }
  }
}

TEST_CASE("h = 2/n: the forced last draw makes the rank moment grow linearly") {
  // With probability (1 - 2/n)^(n-1) -> e^-2 nothing triggers and the
  // forced X_n has expected rank (n + 1) / 2.
  const auto rule = memoryless_rule([](std::int64_t, std::int64_t n) { return 2.0 / static_cast<double>(n); }, "2/n");
  for (std::int64_t n : {1000, 10000}) {
    const auto ev = evaluate_rule(*rule, n, 1.0, 200000, {7, 0, 1, 4096});
    const double miss = std::pow(1.0 - 2.0 / static_cast<double>(n), static_cast<double>(n - 1));
    const double lower = miss * (static_cast<double>(n) + 1.0) / 2.0;
    CHECK(ev.rank_moment.mean > lower - 4.0 * ev.rank_moment.std_error);
    CHECK(ev.rank_moment.mean < lower + 3.0 + 4.0 * ev.rank_moment.std_error);
  }
  const auto fixed = memoryless_family_rule({2.0, 1.0, 0.0});
  std::vector<double> r, x;
  for (std::int64_t n : {100, 1000, 10000}) {
    const auto ev = evaluate_rule(*fixed, n, 1.0, 200000, {7, 0, 1, 4096});
    r.push_back(ev.rank_moment.mean);
    x.push_back(ev.scaled_value_moment.mean);
  }
  CHECK(*std::max_element(r.begin(), r.end()) / *std::min_element(r.begin(), r.end()) < 2.0);
  CHECK(*std::max_element(x.begin(), x.end()) / *std::min_element(x.begin(), x.end()) < 2.0);
}

TEST_CASE("relative-rank DP: small cases by hand and by brute force") {
  CHECK(dp_relative_rank(1).value == 1.0);
  CHECK(dp_relative_rank(2).value == 1.5);
  CHECK(dp_relative_rank(3).value == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  for (int n = 1; n <= 6; ++n) {
    INFO("n=" << n);
    CHECK(relative_rank_value(n) == doctest::Approx(oracle::brute_force_relative_rank(n)).epsilon(1e-12));
  }
}

TEST_CASE("relative-rank DP values are monotone and below the blind choice") {
  double prev = 0.0;
  for (std::int64_t n = 1; n <= 300; ++n) {
    const double v = relative_rank_value(n);
    CHECK(v >= prev - 1e-12);
    CHECK(v <= (static_cast<double>(n) + 1.0) / 2.0 + 1e-12);
    prev = v;
  }
  CHECK(relative_rank_value(1000) == doctest::Approx(3.86).epsilon(0.01));
  CHECK(dp_relative_rank(57).value == relative_rank_value(57));
}

TEST_CASE("relative-rank DP rules reproduce their values by simulation") {
  for (std::int64_t n : {2, 3, 10, 60}) {
    const auto dp = dp_relative_rank(n);
    const auto ev = evaluate_rule(*dp.rule, n, 1.0, 200000, {8, 0, 1, 4096});
    INFO("n=" << n);
    CHECK(within(ev.rank_moment, dp.value));
  }
}

TEST_CASE("full-information DP") {
  CHECK(dp_full_info(1, 1000).value == 1.0);
  const auto two = dp_full_info(2, 10000);
  CHECK(two.value == doctest::Approx(1.25).epsilon(1e-3));
  CHECK(two.first_step_threshold == doctest::Approx(0.5).epsilon(1e-2));

  const auto three = dp_full_info(3, 1000);
  const auto three_fine = dp_full_info(3, 2000);
  CHECK(std::abs(three.value - three_fine.value) < 1e-3);
  CHECK(three_fine.value <= relative_rank_value(3) + 1e-3);
  const auto ev = evaluate_rule(*three_fine.rule, 3, 1.0, 400000, {9, 0, 1, 4096});
  CHECK(within(ev.rank_moment, three_fine.value));
  const auto ev2 = evaluate_rule(*two.rule, 2, 1.0, 400000, {10, 0, 1, 4096});
  CHECK(within(ev2.rank_moment, 1.25));

  try {
    dp_full_info(4, 100);
    FAIL("n = 4 should be rejected");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("rule families") != std::string::npos);
  }
}

TEST_CASE("oracle selections") {
  const auto half = oracle_min_or_uniform(0.5);
  const auto ev = evaluate_oracle(*half, 50, 1.0, 200000, {11, 0, 1, 4096});
  CHECK(within(ev.rank_moment, 0.5 * 1.0 + 0.5 * 25.5));
  CHECK(within(ev.scaled_value_moment, 0.5 * 50.0 / 51.0 + 0.5 * 25.0));

  const auto geo = oracle_geometric_rank(0.5);
  for (std::int64_t n : {100, 10000}) {
    const auto e = evaluate_oracle(*geo, n, 2.0, 20000, {12, 0, 1, 4096});
    CHECK(within(e.rank_moment, 6.0, 5.0)); // E G^2 = (2 - q) / q^2 for Geometric(q)
    CHECK(e.scaled_value_moment.mean < 20.0);
  }
}

TEST_CASE("pattern search improves on its start and is reproducible") {
  PatternSearchOptions opt;
  opt.budget = 25;
  opt.start = {1.0, 1.0, 0.0};
  const auto a = optimize_memoryless(500, 1.0, 20000, {13, 0, 1, 4096}, opt);
  const auto b = optimize_memoryless(500, 1.0, 20000, {13, 0, 1, 4096}, opt);
  CHECK(a.theta == b.theta);
  CHECK(a.evaluations <= 25);
  CHECK(a.trace.size() == static_cast<std::size_t>(a.evaluations));
  CHECK(a.evaluation.rank_moment.mean < a.trace.front().objective);
  CHECK(a.evaluation.rank_moment.mean == std::min_element(a.trace.begin(), a.trace.end(), [](auto& x, auto& y) {
                                           return x.objective < y.objective;
                                         })->objective);

  PatternSearchOptions frozen;
  frozen.frozen = {true, true, true};
  frozen.start = {0.0, 1.0, 0.0};
  const auto c = optimize_memoryless(101, 1.0, 100000, {14, 0, 1, 4096}, frozen);
  CHECK(c.plateau);
  CHECK(c.evaluations == 1);
  CHECK(within(c.evaluation.rank_moment, 51.0));
}
