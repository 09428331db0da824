#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ranklab/stopping.hpp"

namespace ranklab {
namespace {

// Largest r in [0, j] with r * a <= c.
std::int64_t stop_cutoff(double a, double c, std::int64_t j) {
  auto r = static_cast<std::int64_t>(std::floor(c / a));
  r = std::clamp<std::int64_t>(r, 0, j);
  while (r < j && static_cast<double>(r + 1) * a <= c) ++r;
  while (r > 0 && static_cast<double>(r) * a > c) --r;
  return r;
}

// Runs the induction, optionally recording the cutoffs.
double relative_rank_induction(std::int64_t n, std::vector<std::int64_t>* cutoffs) {
  if (n < 1) throw std::invalid_argument("horizon n must be at least 1");
  const double nd = static_cast<double>(n);
  if (cutoffs) {
    cutoffs->assign(static_cast<std::size_t>(n), 0);
    cutoffs->back() = n;
  }
  double cont = (nd + 1.0) / 2.0; // expected rank of X_n
  for (std::int64_t j = n - 1; j >= 1; --j) {
    const double a = (nd + 1.0) / static_cast<double>(j + 1);
    const std::int64_t r = stop_cutoff(a, cont, j);
    if (cutoffs) (*cutoffs)[static_cast<std::size_t>(j - 1)] = r;
    const double rd = static_cast<double>(r);
    cont = (a * rd * (rd + 1.0) / 2.0 + static_cast<double>(j - r) * cont) / static_cast<double>(j);
  }
  return cont;
}

class FullInfoRule final : public StoppingRule {
public:
  FullInfoRule(std::int64_t n, std::vector<double> step1_continuation)
      : n_(n), w_(std::move(step1_continuation)) {}

  std::string id() const override {
    return "fullinfo-dp:" + std::to_string(n_) + ":" + std::to_string(w_.size());
  }
  void check_horizon(std::int64_t n) const override {
    if (n != n_) throw std::invalid_argument("full-information rule was built for a different horizon");
  }
  bool stop(std::int64_t n, std::span<const double> prefix) const override {
    const auto j = static_cast<std::int64_t>(prefix.size());
    if (j >= n) return true;
    const double x = prefix.back();
    double stop_cost = 1.0 + static_cast<double>(n - j) * x;
    for (std::int64_t i = 0; i + 1 < j; ++i)
      if (prefix[static_cast<std::size_t>(i)] < x) stop_cost += 1.0;
    double cont;
    if (j == n - 1) {
      cont = 1.0;
      for (double v : prefix) cont += 1.0 - v;
    } else {
      // n == 3, j == 1: tabulated on the grid.
      const auto g = static_cast<std::int64_t>(w_.size());
      const auto cell = std::min<std::int64_t>(g - 1, static_cast<std::int64_t>(x * static_cast<double>(g)));
      cont = w_[static_cast<std::size_t>(cell)];
    }
    return stop_cost <= cont;
  }

private:
  std::int64_t n_;
  std::vector<double> w_;
};

// Boundary between the leading run of stopping cells and the rest.
double leading_threshold(const std::vector<bool>& stops) {
  const auto g = static_cast<double>(stops.size());
  std::size_t last = 0;
  while (last < stops.size() && stops[last]) ++last;
  return static_cast<double>(last) / g;
}

} // namespace

double relative_rank_value(std::int64_t n) { return relative_rank_induction(n, nullptr); }

RelativeRankDP dp_relative_rank(std::int64_t n) {
  RelativeRankDP out;
  out.value = relative_rank_induction(n, &out.cutoffs);
  out.rule = relative_rank_rule(out.cutoffs);
  return out;
}

FullInfoDP dp_full_info(std::int64_t n, std::int64_t grid_size) {
  if (n < 1) throw std::invalid_argument("horizon n must be at least 1");
  if (n > 3)
    throw std::invalid_argument(
        "full-information DP is only tabulated for n <= 3; use the memoryless or relative-rank rule families");
  if (grid_size < 2) throw std::invalid_argument("grid_size must be at least 2");

  FullInfoDP out;
  out.grid_size = grid_size;
  const double g = static_cast<double>(grid_size);
  auto mid = [g](std::int64_t i) { return (static_cast<double>(i) + 0.5) / g; };

  if (n == 1) {
    out.value = 1.0;
    out.first_step_threshold = 1.0;
    out.rule = std::make_shared<FullInfoRule>(1, std::vector<double>{});
    return out;
  }

  std::vector<double> w(static_cast<std::size_t>(grid_size));
  std::vector<bool> stops(static_cast<std::size_t>(grid_size));
  double total = 0.0;
  for (std::int64_t i = 0; i < grid_size; ++i) {
    const double x1 = mid(i);
    double cont;
    if (n == 2) {
      cont = 2.0 - x1;
    } else {
      // Expected cost from step 2 on, integrating X_2 over the grid.
      double acc = 0.0;
      for (std::int64_t k = 0; k < grid_size; ++k) {
        const double y = mid(k);
        const double stop2 = 1.0 + (x1 < y ? 1.0 : 0.0) + y;
        const double cont2 = 3.0 - x1 - y;
        acc += std::min(stop2, cont2);
      }
      cont = acc / g;
    }
    w[static_cast<std::size_t>(i)] = cont;
    const double stop1 = 1.0 + static_cast<double>(n - 1) * x1;
    stops[static_cast<std::size_t>(i)] = stop1 <= cont;
    total += std::min(stop1, cont);
  }
  out.value = total / g;
  out.first_step_threshold = leading_threshold(stops);
  out.rule = std::make_shared<FullInfoRule>(n, std::move(w));
  return out;
}

} // namespace ranklab
