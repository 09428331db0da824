#include <algorithm>
#include <stdexcept>

#include "ranklab/stopping.hpp"

namespace ranklab {
namespace {

MemorylessTheta project(MemorylessTheta t) {
  t[0] = std::max(0.0, t[0]);
  t[1] = std::max(1e-3, t[1]);
  t[2] = std::max(0.0, t[2]);
  return t;
}

} // namespace

PatternSearchResult optimize_memoryless(std::int64_t n, double p, std::int64_t trials,
                                        const ParallelConfig& parallel, const PatternSearchOptions& options) {
  if (options.budget < 1) throw std::invalid_argument("search budget must be at least one evaluation");
  PatternSearchResult out;

  auto evaluate = [&](const MemorylessTheta& theta) {
    const auto rule = memoryless_family_rule(theta);
    RuleEvaluation ev = evaluate_rule(*rule, n, p, trials, parallel);
    ++out.evaluations;
    out.trace.push_back({theta, ev.rank_moment.mean});
    return ev;
  };

  MemorylessTheta best_theta = project(options.start);
  RuleEvaluation best = evaluate(best_theta);
  MemorylessTheta step = options.step;

  auto all_small = [&] {
    for (std::size_t a = 0; a < 3; ++a)
      if (!options.frozen[a] && step[a] >= options.min_step) return false;
    return true;
  };

  while (out.evaluations < options.budget) {
    if (all_small()) {
      out.plateau = true;
      break;
    }
    bool improved = false;
    for (std::size_t axis = 0; axis < 3 && !improved && out.evaluations < options.budget; ++axis) {
      if (options.frozen[axis] || step[axis] < options.min_step) continue;
      for (double sign : {+1.0, -1.0}) {
        if (out.evaluations >= options.budget) break;
        MemorylessTheta candidate = best_theta;
        candidate[axis] += sign * step[axis];
        candidate = project(candidate);
        if (candidate == best_theta) continue;
        RuleEvaluation ev = evaluate(candidate);
        if (ev.rank_moment.mean < best.rank_moment.mean) {
          best_theta = candidate;
          best = ev;
          improved = true;
          break;
        }
      }
    }
    if (!improved)
      for (auto& s : step) s *= 0.5;
  }

  out.theta = best_theta;
  out.evaluation = best;
  return out;
}

} // namespace ranklab
