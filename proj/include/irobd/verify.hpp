#pragma once

#include <cstdint>

#include "irobd/algorithms.hpp"
#include "irobd/offline.hpp"
#include "irobd/reductions.hpp"
#include "irobd/types.hpp"

namespace irobd {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst_slack = 0;  // min over audited inequalities of RHS − LHS
  std::string detail;      // violated inequality and step, when failing
};

/// Per-step distance recursion between the delay-j and no-delay rows of a
/// sweep, general maps (slot constant L = max_i L_i):
///   ‖y_t^{(j)} − y_t^{(0)}‖² ≤ 8‖v_t^{(j)} − v_t^{(0)}‖²
///                              + 2pL² Σ_{i=1}^p ‖y_{t−i}^{(j−i)} − y_{t−i}^{(0)}‖².
CheckResult check_drift_recursion(const Instance& inst, double lambda, double slack_tol = 1e-8);

/// Linear-map version with the aggregate α = Σ‖C_i‖:
///   ‖y_t^{(j)} − y_t^{(0)}‖² ≤ 8‖v_t^{(j)} − v_t^{(0)}‖²
///                              + 2α² Σ_{i=1}^{j−1} ‖y_{t−i}^{(j−i)} − y_{t−i}^{(0)}‖².
CheckResult check_drift_recursion_linear(const Instance& inst, double lambda,
                                         double slack_tol = 1e-8);

/// Pre-squaring step of the same recursion:
///   ‖y_t^{(j)} − y_t^{(0)}‖ ≤ 2‖v_t^{(j)} − v_t^{(0)}‖ + ‖δ(mixed) − δ(row 0)‖.
CheckResult check_drift_triangle(const Instance& inst, double lambda, double slack_tol = 1e-8);

/// No-delay run against any comparator trajectory sharing the prehistory:
///   Σ(H⁰ + λM⁰) ≤ Σ(H^c + λ(m+λ)/(m+(1−p²L²)λ)·M^c),
/// valid whenever m + (1−p²L²)λ > 0.
CheckResult check_tracking_bound(const Instance& inst, double lambda,
                                 const Trajectory& comparator, double slack_tol = 1e-6);

/// Per-step move-to-minimizer bounds against an offline comparator
/// (unit-map single-step memory instances only).
CheckResult check_m2m_step_bounds(const Instance& inst, const Trajectory& offline,
                                  double slack_tol = 1e-6);

/// Pairwise agreement of the exact solve, the table oracle and multistart on
/// 1-D linear-map instances.
CheckResult check_oracle_agreement(const Instance& inst, double agree_tol = 1e-4);

/// The dispatched oracle must not exceed any supplied algorithm trajectory's
/// cost (multistart seeds itself with those trajectories).
CheckResult check_oracle_dominance(const Instance& inst, const std::vector<Trajectory>& algs,
                                   double tol = 1e-8);

CheckResult check_reduction_linear(const LinearControlSystem& sys, uint64_t seed,
                                   double tol = 1e-8);
CheckResult check_reduction_nonlinear(const NonlinearControlSystem& sys, uint64_t seed,
                                      double tol = 1e-8);

/// Seeded random plants for the battery and tests.
LinearControlSystem gen_random_canonical(uint64_t seed, int max_n = 6, int max_d = 3, int T = 12);
NonlinearControlSystem gen_random_nonlinear_system(uint64_t seed, int max_n = 3, int T = 12);

/// The no-delay decision sequence on the true costs, delay ignored
/// (comparison baseline for the checks; run_robd itself insists on k = 0).
Trajectory full_information_robd(const Instance& inst, double lambda,
                                 const SolverConfig& cfg = {});

struct BatteryConfig {
  uint64_t seed = 1;
  int instances = 25;
  double lambda = 0.5;
};

struct BatterySummary {
  std::vector<CheckResult> results;
  bool all_pass = true;
};

/// The registered inequality battery over seeded random instances and
/// plants; each entry aggregates one check family.
BatterySummary run_battery(const BatteryConfig& cfg);

/// Checks applicable to one concrete instance.
BatterySummary run_instance_checks(const Instance& inst, double lambda);

}  // namespace irobd
