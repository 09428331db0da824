#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ranklab/bounds.hpp"

using namespace ranklab;

TEST_CASE("power-mean constant") {
  CHECK(c_p(1.0) == 1.0);
  CHECK(c_p(2.0) == 2.0);
  CHECK(c_p(0.5) == 1.0);
  CHECK(c_p(3.0) == 4.0);
  CHECK_THROWS_AS(c_p(0.0), std::invalid_argument);
}

TEST_CASE("power-mean inequality on random triples") {
  gen::Gen g(1);
  int violations = 0;
  for (int i = 0; i < 1000000; ++i) {
    const double p = g.real(0.0, 4.0) + 1e-9;
    const double a = g.real(0.0, 1.0) < 0.05 ? 0.0 : std::exp(g.real(-20.0, 20.0));
    const double b = std::exp(g.real(-20.0, 20.0));
    if (link_fails(std::pow(a + b, p), c_p(p) * (std::pow(a, p) + std::pow(b, p)))) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("deterministic chain example") {
  const std::vector<double> inc(10, 0.5);
  const auto path = WalkPath::from_increments(inc);
  const auto M = supremum_of(path, 1.0);
  CHECK(M.value == 0.0);
  const auto r = check_corollary_chain(path, M, 4, 1.0);
  CHECK(r.lhs == 2.0);
  CHECK(*r.mid == 4.0);
  CHECK(r.rhs == 4.0);
  CHECK(r.slack == 2.0);
  CHECK_FALSE(r.violated);
  CHECK(r.outcome == BoundOutcome::Holds);
}

TEST_CASE("chain rejects a supremum from another lambda or path") {
  RngStream rng(2, 0);
  auto draw = simulate_walk(DistributionSpec::exponential(1.0), 2.0, rng);
  auto other = draw.supremum;
  other.lambda = 3.0;
  if (supremum_of(draw.path, 3.0).value != draw.supremum.value)
    CHECK_THROWS_AS(check_corollary_chain(draw.path, other, 1, 1.0), std::invalid_argument);
  auto shifted = draw.supremum;
  shifted.value += 1.0;
  CHECK_THROWS_AS(check_corollary_chain(draw.path, shifted, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(check_corollary_chain(draw.path, draw.supremum, draw.path.length() + 1, 1.0),
                  std::invalid_argument);
}

TEST_CASE("chain holds on random exponential paths") {
  RngStream rng(3, 0);
  gen::Gen g(3);
  const std::vector<double> ps{0.5, 1.0, 2.0, 3.0};
  int violations = 0;
  double min_slack = HUGE_VAL;
  for (int i = 0; i < 20000; ++i) {
    WalkControl ctl;
    ctl.min_length = 100;
    auto draw = simulate_walk(DistributionSpec::exponential(1.0), 2.0, rng, ctl);
    const std::vector<std::int64_t> sigmas{0, 1, g.integer(1, 100), 100};
    for (const auto& r : check_corollary_chain(draw.path, draw.supremum, sigmas, ps)) {
      violations += r.violated;
      if (r.params.p == 1.0) min_slack = std::min(min_slack, r.slack);
    }
  }
  CHECK(violations == 0);
  CHECK(min_slack >= -1e-9);
}

TEST_CASE("coupled samples share one increment stream") {
  RngStream rng(4, 0);
  const std::vector<double> lambdas{1.5, 2.0, 3.0};
  auto cs = draw_coupled(100, lambdas, rng);
  REQUIRE(cs.suprema.size() == 3);
  CHECK(cs.path.length() >= 100);
  for (std::int64_t k = 1; k <= 100; ++k) CHECK(cs.path.sum_at(k) == cs.order_stats.sums[static_cast<std::size_t>(k - 1)]);
  CHECK(cs.suprema[0].value >= cs.suprema[1].value);
  CHECK(cs.suprema[1].value >= cs.suprema[2].value);

  auto again = couple(cs.order_stats, cs.path, cs.suprema);
  CHECK(again.path.length() == cs.path.length());

  auto independent = sample_order_stats(100, Normalization::PaperSn, rng);
  CHECK_THROWS_AS(couple(independent, cs.path, cs.suprema), std::invalid_argument);
  auto beta = sample_order_stats(100, Normalization::BetaSn1, rng);
  CHECK_THROWS_AS(couple(beta, cs.path, cs.suprema), std::invalid_argument);
  auto bad = cs.suprema;
  bad[1].value += 1.0;
  CHECK_THROWS_AS(couple(cs.order_stats, cs.path, bad), std::invalid_argument);
  CHECK_THROWS_AS(draw_coupled(10, std::vector<double>{1.0}, rng), std::invalid_argument);
}

TEST_CASE("decomposition holds on coupled samples, including both branches") {
  RngStream rng(5, 0);
  const std::vector<double> lambdas{2.0};
  int violations = 0, on_A = 0, off_A = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto cs = draw_coupled(100, lambdas, rng);
    for (std::int64_t k : {1, 10, 100}) {
      for (double p : {1.0, 2.0}) {
        const auto r = check_decomposition(cs, 0, k, p, 0.1);
        violations += r.violated;
        (r.mid ? off_A : on_A) += 1;
        if (k == 100) CHECK(r.lhs == std::pow(100.0, p));
      }
    }
  }
  CHECK(violations == 0);
  CHECK(on_A > 0);
  CHECK(off_A > 0);
}

TEST_CASE("decomposition on the large-deviation event is dominated by the indicator") {
  // S_n = 0.5 with n = 2: n / S_n = 4 > 1 + eps.
  const std::vector<double> inc{0.25, 0.25};
  auto path = WalkPath::from_increments(inc);
  auto os = order_stats_from_increments(inc, 2, Normalization::PaperSn);
  const auto cs = couple(os, path, {supremum_of(path, 1.5)});
  const auto r = check_decomposition(cs, 0, 2, 1.0, 0.1);
  CHECK_FALSE(r.mid.has_value());
  CHECK(r.rhs >= 2.0);
  CHECK(r.lhs == 2.0);
  CHECK_FALSE(r.violated);
}

TEST_CASE("fixed-index rule: both sides grow, marked undecided") {
  LimsupOptions opt;
  opt.n_grid = {10, 100, 1000};
  opt.lambdas = {2.0};
  opt.trials = 20000;
  opt.m_samples = 20000;
  const auto rows = demonstrate_limsup(*fixed_index_rule(1), 1.0, opt, {6, 0, 1, 4096});
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.report.outcome == BoundOutcome::Undecided);
    CHECK_FALSE(row.report.violated);
    CHECK(row.report.lhs <= row.report.rhs);
  }
  CHECK(rows[2].report.lhs > 5.0 * rows[0].report.lhs);
}

TEST_CASE("memoryless rule: limsup comparison holds for each lambda") {
  LimsupOptions opt;
  opt.n_grid = {100, 1000};
  opt.trials = 50000;
  opt.m_samples = 50000;
  for (double p : {1.0, 2.0}) {
    const auto rows = demonstrate_limsup(*memoryless_family_rule({2.0, 1.0, 0.0}), p, opt, {7, 0, 1, 4096});
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) {
      CHECK(row.report.outcome == BoundOutcome::Holds);
      CHECK(row.m.estimate.mean == doctest::Approx(oracle::exp_supremum_moment(row.report.params.lambda, p)).epsilon(0.1));
    }
  }
}
