#pragma once

// Test-side reference computations, written independently of the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "ranklab/rng.hpp"

namespace oracle {

/// Root in (0,1) of exp(-lambda theta) = 1 - theta, by bisection.
inline double lundberg_root(double lambda) {
  auto f = [lambda](double t) { return std::exp(-lambda * t) - (1.0 - t); };
  double lo = 1e-12, hi = 1.0 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// For Exp(1) steps every ascending ladder overshoot is Exp(1), so
/// P(M > x) = (1 - theta) e^{-theta x} and E M^p = (1 - theta) Gamma(p+1) / theta^p.
inline double exp_supremum_moment(double lambda, double p) {
  const double theta = lundberg_root(lambda);
  return (1.0 - theta) * std::tgamma(p + 1.0) / std::pow(theta, p);
}

inline double exp_supremum_atom(double lambda) { return lundberg_root(lambda); }

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const long double la = a, lx = x;
  const long double log_pref = la * std::log(lx) - lx - std::lgamma(la);
  if (x < a + 1.0) {
    long double term = 1.0L / la, sum = term;
    for (int k = 1; k < 100000; ++k) {
      term *= lx / (la + k);
      sum += term;
      if (term < sum * 1e-19L) break;
    }
    return static_cast<double>(sum * std::exp(log_pref));
  }
  // Lentz continued fraction for Q(a, x).
  const long double tiny = 1e-300L;
  long double b = lx + 1.0L - la, c = 1.0L / tiny, d = 1.0L / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const long double an = -i * (i - la);
    b += 2.0L;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0L) < 1e-19L) break;
  }
  return static_cast<double>(1.0L - std::exp(log_pref) * h);
}

inline double chi_square_survival(double stat, int df) { return 1.0 - gamma_p(0.5 * df, 0.5 * stat); }

/// Optimal expected rank over rules that see relative ranks only, by brute
/// force over all n! orderings and every relative-rank history.
inline double brute_force_relative_rank(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::vector<int>> perms, histories;
  do {
    std::vector<int> h(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      int r = 1;
      for (int i = 0; i < j; ++i)
        if (perm[static_cast<std::size_t>(i)] < perm[static_cast<std::size_t>(j)]) ++r;
      h[static_cast<std::size_t>(j)] = r;
    }
    perms.push_back(perm);
    histories.push_back(h);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::function<double(std::vector<int>&)> value = [&](std::vector<int>& prefix) -> double {
    const auto j = prefix.size();
    double stop = 0.0;
    int matches = 0;
    for (std::size_t q = 0; q < perms.size(); ++q) {
      if (!std::equal(prefix.begin(), prefix.end(), histories[q].begin())) continue;
      stop += perms[q][j - 1];
      ++matches;
    }
    stop /= matches;
    if (static_cast<int>(j) == n) return stop;
    double cont = 0.0;
    for (int r = 1; r <= static_cast<int>(j) + 1; ++r) {
      prefix.push_back(r);
      cont += value(prefix);
      prefix.pop_back();
    }
    cont /= static_cast<double>(j + 1);
    return std::min(stop, cont);
  };
  double total = 0.0;
  std::vector<int> prefix{1};
  total = value(prefix);
  return total;
}

} // namespace oracle

namespace gen {

/// Small hand-rolled generator for property tests.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed, 0xfeed) {}
  double real(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_.uniform() * static_cast<double>(hi - lo + 1));
  }
  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(items.size()) - 1))];
  }
  ranklab::RngStream& rng() { return rng_; }

private:
  ranklab::RngStream rng_;
};

} // namespace gen

namespace oracle {

/// Asymptotic p-value of the two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) sum += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
  return std::clamp(sum, 0.0, 1.0);
}

} // namespace oracle
