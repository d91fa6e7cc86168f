#pragma once

#include <cstdint>
#include <string>

#include "irobd/prox.hpp"
#include "irobd/types.hpp"

namespace irobd {

/// 1-D state bracket for the brute-force table oracle. With auto_bracket the
/// bracket is derived from the minimizer range: [min v − 3·range,
/// max v + 3·range]. Anchor states are merged into the uniform grid exactly
/// (minimizers, prehistory and map-specific salient points by default).
struct GridSpec {
  double lo = 0;
  double hi = 0;
  int cells = 2001;
  bool auto_bracket = true;
  std::vector<double> anchors;
};

/// Exact joint solve of the full-horizon objective for linear memory maps:
/// the problem is an unconstrained strongly convex quadratic in the stacked
/// trajectory, solved by one factorization.
Trajectory solve_offline_convex(const Instance& inst, const SolverConfig& cfg = {});

/// Grid dynamic program over the augmented state (y_{t−1}, …, y_{t−p}).
/// d = 1 and p ≤ 2 only; the optimum over grid-restricted trajectories upper
/// bounds the continuous optimum by O(cell² · curvature) per step.
Trajectory solve_offline_dp(const Instance& inst, GridSpec grid = {});

/// Best local optimum of the joint objective over several descent restarts.
/// Seeds: the minimizer sequence, the zero-switching rollout, random
/// perturbations of both, plus any caller-provided trajectories.
Trajectory solve_offline_multistart(const Instance& inst, int restarts, uint64_t seed,
                                    const SolverConfig& cfg = {},
                                    const std::vector<Trajectory>& extra_seeds = {});

struct OracleResult {
  Trajectory trajectory;
  std::string method;  // "convex", "dp" or "multistart" (provenance)
  double cost = 0;
};

/// Oracle dispatch: exact convex solve for linear maps, table oracle for 1-D
/// nonlinear maps, multistart elsewhere.
OracleResult solve_offline(const Instance& inst, const SolverConfig& cfg = {},
                           int restarts = 32, uint64_t seed = 1);

/// Joint objective value of a trajectory (hitting plus switching).
double offline_objective(const Instance& inst, const Trajectory& traj);

}  // namespace irobd
