#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ranklab/rng.hpp"

namespace ranklab {

struct Exponential {
  double rate;
  bool operator==(const Exponential&) const = default;
};
/// Survival P(xi > x) = (scale / x)^alpha for x >= scale.
struct Pareto {
  double alpha;
  double scale;
  bool operator==(const Pareto&) const = default;
};
struct Uniform01 {
  bool operator==(const Uniform01&) const = default;
};
struct Deterministic {
  double value;
  bool operator==(const Deterministic&) const = default;
};

/// Law of a nonnegative iid increment. Immutable once constructed; parameters
/// are validated by the factory functions, so sampling never fails.
class DistributionSpec {
public:
  using Family = std::variant<Exponential, Pareto, Uniform01, Deterministic>;

  static DistributionSpec exponential(double rate);
  static DistributionSpec pareto(double alpha, double scale);
  static DistributionSpec uniform01();
  static DistributionSpec deterministic(double value);

  /// Parse `exp:1.0`, `pareto:2.5,1.0`, `unif`, `det:2.0`.
  static DistributionSpec parse(std::string_view text);

  const Family& family() const noexcept { return family_; }
  std::string to_string() const;

  bool operator==(const DistributionSpec&) const = default;

private:
  explicit DistributionSpec(Family f) : family_(f) {}
  Family family_;
};

/// One draw from the law; always >= 0.
inline double sample(const DistributionSpec& spec, RngStream& rng) noexcept {
  struct Visitor {
    RngStream& rng;
    double operator()(const Exponential& e) const noexcept { return -std::log(rng.uniform()) / e.rate; }
    double operator()(const Pareto& p) const noexcept {
      return p.scale * std::pow(rng.uniform(), -1.0 / p.alpha);
    }
    double operator()(const Uniform01&) const noexcept { return rng.uniform(); }
    double operator()(const Deterministic& d) const noexcept { return d.value; }
  };
  return std::visit(Visitor{rng}, spec.family());
}

/// Standard exponential, the increment law of the order-statistics and
/// Poisson embeddings.
inline double sample_exp1(RngStream& rng) noexcept { return -std::log(rng.uniform()); }

/// Standard normal.
double sample_normal(RngStream& rng) noexcept;

/// Gamma(shape, 1); shape > 0.
double sample_gamma(double shape, RngStream& rng) noexcept;

/// Binomial(trials, prob).
long long sample_binomial(long long trials, double prob, RngStream& rng) noexcept;

/// Analytic mean, or nullopt when it is infinite (Pareto with alpha <= 1).
std::optional<double> finite_mean(const DistributionSpec& spec) noexcept;

/// Analytic mean; throws std::domain_error for infinite-mean laws.
double mean(const DistributionSpec& spec);

/// Standard deviation, or nullopt when the variance is infinite.
std::optional<double> finite_stddev(const DistributionSpec& spec) noexcept;

/// True iff E xi^q < infinity.
bool moment_finite(const DistributionSpec& spec, double q);

/// Quantile function (inverse cdf) at u in (0,1).
double quantile(const DistributionSpec& spec, double u);

} // namespace ranklab
