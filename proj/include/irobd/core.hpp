#pragma once

#include <cstdint>
#include <utility>

#include "irobd/types.hpp"

namespace irobd {

/// f_t(y) = ½(y − v)ᵀQ(y − v). Non-negative, zero exactly at the minimizer.
double evaluate_hitting(const HittingCost& cost, const Vec& y);

/// ½‖y_t − δ(y_{t−1:t−p})‖² for a window [y_t, y_{t−1}, …, y_{t−p}].
double evaluate_switching(const SwitchingCost& sw, const std::vector<Vec>& window);

/// Per-step decomposition of a trajectory's cost on an instance.
CostReport evaluate_total(const Instance& inst, const Trajectory& traj);

/// alg.total / opt.total; +inf when only the denominator vanishes
/// (unbounded ratio), 1 when both vanish.
double competitive_ratio(const CostReport& alg, const CostReport& opt);

/// The memory window [y_{t−1}, …, y_{t−p}] for round t, drawing indices ≤ 0
/// from the instance prehistory.
std::vector<Vec> memory_window(const Instance& inst, const std::vector<Vec>& decisions, int t);

/// y_t = v_t: chase the minimizers exactly.
Trajectory minimizer_trajectory(const Instance& inst);

/// y_t = δ(y_{t−1:t−p}): the zero-switching rollout from the prehistory.
Trajectory rollout_trajectory(const Instance& inst);

// ---------------------------------------------------------------------------
// Randomized Lipschitz audit.
// ---------------------------------------------------------------------------

struct LipschitzReport {
  struct Slot {
    double declared = 0;
    double observed = 0;  // max difference quotient seen for this slot
    bool exceeded = false;
  };
  std::vector<Slot> slots;
  bool ok = true;
};

/// Audits each slot constant of δ against sampled per-slot difference
/// quotients on box^p. For the linear kind the per-slot supremum is a
/// spectral norm and is computed exactly instead of sampled.
LipschitzReport validate_lipschitz(const SwitchingCost& sw,
                                   const std::vector<std::pair<double, double>>& box,
                                   int samples, uint64_t seed);

}  // namespace irobd
