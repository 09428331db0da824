#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ranklab/rng.hpp"
#include "ranklab/stats.hpp"

namespace ranklab {

/// Atom (T_k, S_k) of the unit-rate planar Poisson process on [0,1] x [0,inf).
/// k is the rank label: S_k is the k-th smallest s-value.
struct PoissonAtom {
  double t = 0.0;
  double s = 0.0;
  std::int64_t k = 0;
};

/// Atoms with s <= s_cap, sorted by arrival time t.
struct PoissonAtoms {
  std::vector<PoissonAtom> atoms;
  double s_cap = 0.0;

  std::int64_t count() const noexcept { return static_cast<std::int64_t>(atoms.size()); }
};

/// S_k are Exp(1) partial sums generated until one exceeds s_cap, T_k iid
/// uniform. Throws std::invalid_argument unless s_cap > 0.
PoissonAtoms sample_atoms(double s_cap, RngStream& rng);

/// Boundary rule: stop at the first atom in time with s <= b(t).
///   zero      b(t) = 0 (never stops)
///   const:c   b(t) = c
///   recip:c   b(t) = min(c / (1 - t), cap)
class PoissonRule {
public:
  enum class Kind { Zero, Constant, Reciprocal };

  static PoissonRule zero();
  static PoissonRule constant(double c);
  static PoissonRule reciprocal(double c, double cap);
  /// "zero", "const:3", "recip:2.0"; recip is capped at `cap`.
  static PoissonRule parse(std::string_view text, double cap);

  double boundary(double t) const noexcept;
  double sup_boundary() const noexcept;
  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return c_; }
  std::string id() const;

  /// Position in atoms.atoms of the stopping atom. Looks at atoms in time
  /// order and decides on each one from (t, s) alone.
  std::optional<std::size_t> first_stop(const PoissonAtoms& atoms) const;

private:
  PoissonRule(Kind kind, double c, double cap) : kind_(kind), c_(c), cap_(cap) {}
  Kind kind_;
  double c_;
  double cap_;
};

struct PoissonEpisode {
  bool stopped = false;
  double stopped_t = 0.0;
  double stopped_s = 0.0;
  /// Rank label of the stopped atom; count + 1 when the rule never stops.
  std::int64_t rank = 0;
};

PoissonEpisode run_poisson_episode(const PoissonRule& rule, double s_cap, RngStream& rng);

struct PoissonRun {
  MomentEstimate rank_moment;  // E[R^p] with the no-stop surrogate
  MomentEstimate no_stop;      // frequency of episodes that never stop
  std::vector<PoissonEpisode> episodes; // filled when requested, trial order
};

/// Throws std::invalid_argument when the boundary can exceed s_cap, since
/// truncation would then hide stoppable atoms.
PoissonRun run_poisson_rule(const PoissonRule& rule, double s_cap, double p, std::int64_t trials,
                            const ParallelConfig& parallel, bool keep_episodes = false);

struct ReciprocalTuning {
  double best_c = 0.0;
  std::vector<std::pair<double, MomentEstimate>> grid;
};

/// Evaluates recip:c for each c on the same random numbers and keeps the
/// smallest rank moment.
ReciprocalTuning tune_reciprocal(const std::vector<double>& c_grid, double s_cap, double p,
                                 std::int64_t trials, const ParallelConfig& parallel);

} // namespace ranklab
