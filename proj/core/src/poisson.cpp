#include "ranklab/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ranklab/dist.hpp"

namespace ranklab {

PoissonAtoms sample_atoms(double s_cap, RngStream& rng) {
  if (!(s_cap > 0.0) || !std::isfinite(s_cap)) throw std::invalid_argument("s_cap must be positive and finite");
  PoissonAtoms out;
  out.s_cap = s_cap;
  double s = 0.0;
  for (std::int64_t k = 1;; ++k) {
    s += sample_exp1(rng);
    if (s > s_cap) break;
    out.atoms.push_back({rng.uniform(), s, k});
  }
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const PoissonAtom& a, const PoissonAtom& b) { return a.t < b.t; });
  return out;
}

PoissonRule PoissonRule::zero() { return {Kind::Zero, 0.0, 0.0}; }

PoissonRule PoissonRule::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("constant boundary must be finite and >= 0");
  return {Kind::Constant, c, c};
}

PoissonRule PoissonRule::reciprocal(double c, double cap) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("reciprocal boundary needs c > 0");
  if (!(cap >= c) || !std::isfinite(cap)) throw std::invalid_argument("reciprocal boundary cap must be finite and >= c");
  return {Kind::Reciprocal, c, cap};
}

PoissonRule PoissonRule::parse(std::string_view text, double cap) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  if (name == "zero" && colon == std::string_view::npos) return zero();
  if (colon == std::string_view::npos)
    throw std::invalid_argument("boundary '" + std::string(text) + "' needs a parameter");
  const std::string arg(text.substr(colon + 1));
  std::size_t used = 0;
  double c = 0.0;
  try {
    c = std::stod(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != arg.size()) throw std::invalid_argument("bad boundary parameter in '" + std::string(text) + "'");
  if (name == "const") return constant(c);
  if (name == "recip") return reciprocal(c, cap);
  throw std::invalid_argument("unknown boundary '" + std::string(text) + "'");
}

double PoissonRule::boundary(double t) const noexcept {
  switch (kind_) {
  case Kind::Zero: return 0.0;
  case Kind::Constant: return c_;
  case Kind::Reciprocal: return t >= 1.0 ? cap_ : std::min(cap_, c_ / (1.0 - t));
  }
  return 0.0;
}

double PoissonRule::sup_boundary() const noexcept { return kind_ == Kind::Zero ? 0.0 : cap_; }

std::string PoissonRule::id() const {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
    return s;
  };
  switch (kind_) {
  case Kind::Zero: return "zero";
  case Kind::Constant: return "const:" + num(c_);
  case Kind::Reciprocal: return "recip:" + num(c_) + ",cap=" + num(cap_);
  }
  return "";
}

std::optional<std::size_t> PoissonRule::first_stop(const PoissonAtoms& atoms) const {
  if (kind_ == Kind::Zero) return std::nullopt;
  for (std::size_t i = 0; i < atoms.atoms.size(); ++i)
    if (atoms.atoms[i].s <= boundary(atoms.atoms[i].t)) return i;
  return std::nullopt;
}

PoissonEpisode run_poisson_episode(const PoissonRule& rule, double s_cap, RngStream& rng) {
  const PoissonAtoms atoms = sample_atoms(s_cap, rng);
  PoissonEpisode e;
  if (const auto i = rule.first_stop(atoms)) {
    const PoissonAtom& a = atoms.atoms[*i];
    e = {true, a.t, a.s, a.k};
  } else {
    e.rank = atoms.count() + 1;
  }
  return e;
}

namespace {

struct PoissonChunk {
  Accumulator rank;
  Accumulator no_stop;
  std::vector<PoissonEpisode> episodes;
};

void check_rule(const PoissonRule& rule, double s_cap) {
  if (!(s_cap > 0.0) || !std::isfinite(s_cap)) throw std::invalid_argument("s_cap must be positive and finite");
  if (rule.sup_boundary() > s_cap)
    throw std::invalid_argument("boundary " + rule.id() + " exceeds s_cap; truncation would censor stoppable atoms");
}

} // namespace

PoissonRun run_poisson_rule(const PoissonRule& rule, double s_cap, double p, std::int64_t trials,
                            const ParallelConfig& parallel, bool keep_episodes) {
  check_rule(rule, s_cap);
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");

  auto chunks = run_chunks(trials, parallel, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
    RngStream rng(parallel.seed, parallel.stream_base + static_cast<std::uint64_t>(chunk));
    PoissonChunk out;
    if (keep_episodes) out.episodes.reserve(static_cast<std::size_t>(end - begin));
    for (std::int64_t i = begin; i < end; ++i) {
      const PoissonEpisode e = run_poisson_episode(rule, s_cap, rng);
      out.rank.push(std::pow(static_cast<double>(e.rank), p));
      out.no_stop.push(e.stopped ? 0.0 : 1.0);
      if (keep_episodes) out.episodes.push_back(e);
    }
    return out;
  });

  Accumulator rank, no_stop;
  PoissonRun run;
  for (auto& c : chunks) {
    rank.merge(c.rank);
    no_stop.merge(c.no_stop);
    if (keep_episodes) run.episodes.insert(run.episodes.end(), c.episodes.begin(), c.episodes.end());
  }
  run.rank_moment = rank.estimate(p);
  run.no_stop = no_stop.estimate(1.0);
  return run;
}

ReciprocalTuning tune_reciprocal(const std::vector<double>& c_grid, double s_cap, double p,
                                 std::int64_t trials, const ParallelConfig& parallel) {
  if (c_grid.empty()) throw std::invalid_argument("empty grid");
  ReciprocalTuning out;
  double best = 0.0;
  for (double c : c_grid) {
    const auto est = run_poisson_rule(PoissonRule::reciprocal(c, s_cap), s_cap, p, trials, parallel).rank_moment;
    out.grid.emplace_back(c, est);
    if (out.grid.size() == 1 || est.mean < best) {
      best = est.mean;
      out.best_c = c;
    }
  }
  return out;
}

} // namespace ranklab
