#include "ranklab/dist.hpp"

#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ranklab {
namespace {

std::vector<double> parse_params(std::string_view text, std::string_view whole) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string token(text.substr(0, comma));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size())
      throw std::invalid_argument("bad distribution parameter '" + token + "' in '" +
                                  std::string(whole) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

} // namespace

DistributionSpec DistributionSpec::exponential(double rate) {
  require_positive(rate, "exponential rate");
  return DistributionSpec(Exponential{rate});
}

DistributionSpec DistributionSpec::pareto(double alpha, double scale) {
  require_positive(alpha, "pareto alpha");
  require_positive(scale, "pareto scale");
  return DistributionSpec(Pareto{alpha, scale});
}

DistributionSpec DistributionSpec::uniform01() { return DistributionSpec(Uniform01{}); }

DistributionSpec DistributionSpec::deterministic(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw std::invalid_argument("deterministic value must be nonnegative and finite");
  return DistributionSpec(Deterministic{value});
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const auto params = colon == std::string_view::npos
                          ? std::vector<double>{}
                          : parse_params(text.substr(colon + 1), text);
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      throw std::invalid_argument("wrong number of parameters in '" + std::string(text) + "'");
  };
  if (name == "exp") {
    arity(0, 1);
    return exponential(params.empty() ? 1.0 : params[0]);
  }
  if (name == "pareto") {
    arity(1, 2);
    return pareto(params[0], params.size() > 1 ? params[1] : 1.0);
  }
  if (name == "unif") {
    arity(0, 0);
    return uniform01();
  }
  if (name == "det") {
    arity(1, 1);
    return deterministic(params[0]);
  }
  throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

std::string DistributionSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  struct Visitor {
    std::ostringstream& os;
    void operator()(const Exponential& e) const { os << "exp:" << e.rate; }
    void operator()(const Pareto& p) const { os << "pareto:" << p.alpha << ',' << p.scale; }
    void operator()(const Uniform01&) const { os << "unif"; }
    void operator()(const Deterministic& d) const { os << "det:" << d.value; }
  };
  std::visit(Visitor{os}, family_);
  return os.str();
}

double sample_normal(RngStream& rng) noexcept {
  return std::normal_distribution<double>{}(rng);
}

double sample_gamma(double shape, RngStream& rng) noexcept {
  return std::gamma_distribution<double>{shape, 1.0}(rng);
}

long long sample_binomial(long long trials, double prob, RngStream& rng) noexcept {
  if (trials <= 0 || prob <= 0.0) return 0;
  if (prob >= 1.0) return trials;
  return std::binomial_distribution<long long>{trials, prob}(rng);
}

std::optional<double> finite_mean(const DistributionSpec& spec) noexcept {
  struct Visitor {
    std::optional<double> operator()(const Exponential& e) const { return 1.0 / e.rate; }
    std::optional<double> operator()(const Pareto& p) const {
      if (p.alpha <= 1.0) return std::nullopt;
      return p.alpha * p.scale / (p.alpha - 1.0);
    }
    std::optional<double> operator()(const Uniform01&) const { return 0.5; }
    std::optional<double> operator()(const Deterministic& d) const { return d.value; }
  };
  return std::visit(Visitor{}, spec.family());
}

double mean(const DistributionSpec& spec) {
  const auto m = finite_mean(spec);
  if (!m) throw std::domain_error("distribution " + spec.to_string() + " has infinite mean");
  return *m;
}

std::optional<double> finite_stddev(const DistributionSpec& spec) noexcept {
  struct Visitor {
    std::optional<double> operator()(const Exponential& e) const { return 1.0 / e.rate; }
    std::optional<double> operator()(const Pareto& p) const {
      if (p.alpha <= 2.0) return std::nullopt;
      const double a = p.alpha;
      return p.scale / (a - 1.0) * std::sqrt(a / (a - 2.0));
    }
    std::optional<double> operator()(const Uniform01&) const { return std::sqrt(1.0 / 12.0); }
    std::optional<double> operator()(const Deterministic&) const { return 0.0; }
  };
  return std::visit(Visitor{}, spec.family());
}

bool moment_finite(const DistributionSpec& spec, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("moment order must be positive");
  if (const auto* p = std::get_if<Pareto>(&spec.family())) return q < p->alpha;
  return true;
}

double quantile(const DistributionSpec& spec, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
  struct Visitor {
    double u;
    double operator()(const Exponential& e) const { return -std::log1p(-u) / e.rate; }
    double operator()(const Pareto& p) const { return p.scale * std::pow(1.0 - u, -1.0 / p.alpha); }
    double operator()(const Uniform01&) const { return u; }
    double operator()(const Deterministic& d) const { return d.value; }
  };
  return std::visit(Visitor{u}, spec.family());
}

} // namespace ranklab
