#pragma once

#include <cstdint>
#include <functional>

#include "irobd/types.hpp"

namespace irobd {

/// Worst-case escalation family (CLI family "thm3"): horizon equals the
/// delay, so nothing is revealed before the game ends; targets grow
/// geometrically (v_t = α^{t−1}) and the memory map amplifies by α.
Instance gen_thm3(double m, double alpha, int k);

/// Single-step linear family with map 1+L (CLI family "remark1"): switching
/// ½‖y_t − y_{t−1} − L·y_{t−1}‖² and seeded random targets. With
/// sine_deviation the deviation map becomes L·sin(y) (same Lipschitz
/// constant, genuinely nonlinear), emitted as a callback map.
Instance gen_remark1(double m, double L, int T, uint64_t seed, bool sine_deviation = false);

struct Remark2Output {
  Instance instance;       // plateau-sine game in rescaled coordinates
  Trajectory reference;    // early-departure path whose cost is 3γε² exactly
  double scale = 1;        // coordinate scale σ = √(2/γ)
};

/// Plateau-sine adversarial family (CLI family "remark2"): targets climb by
/// ε per round, then jump back; the memory map's deviation flips sign inside
/// a width-γε window, so any follower pays ~ε² while an early departure pays
/// only 3γε². Emitted in coordinates scaled by √(2/γ), which prices the
/// follower's forced step at 2ε²/γ and the reference path at exactly 3γε².
Remark2Output gen_remark2(double eps, double gamma, int n);

/// The unscaled plateau/sine/plateau deviation map itself (value at y).
/// Slope magnitude is bounded by π/γ, approached mid-segment.
double plateau_sine_base(double eps, double gamma, int n, double y);

enum class DroneProfile { Hover, Cruise, Walk };

/// 1-D velocity-tracking family (CLI family "drone"): unit tracking costs at
/// a desired-speed profile, memory map y − (C1 + C2|y|y).
Instance gen_drone(double c1, double c2, int T, int k, DroneProfile profile, uint64_t seed);

struct RandomSpec {
  uint64_t seed = 1;
  double m = 1;
  double l = 1;
  int T = 10;
  int d = 1;
  int p = 1;
  int k = 0;
  enum class DeltaKind { Linear, Drone } delta_kind = DeltaKind::Linear;
  double alpha = 0.5;      // requested Σ‖C_i‖ for the linear kind
  double drone_c1 = 0.1;   // drone-kind parameters
  double drone_c2 = 0.01;
};

/// Seed-deterministic random family (CLI family "random"): curvatures drawn
/// in [m, l], targets follow a random walk, linear maps rescaled so the
/// spectral norms sum to the requested α.
Instance gen_random(const RandomSpec& spec);

/// Outcome of the adaptive plateau-sine game: the adversary stops the game
/// at the first deviation from the targets (tracking is free, so any cost
/// incurred by then makes the ratio unbounded); if the algorithm tracks all
/// the way, it is compared against the early-departure reference path.
struct PlateauGame {
  bool deviated = false;
  int stop_round = 0;       // first deviating round, 0 when none
  double algorithm_cost = 0;
  double adversary_cost = 0;
  double ratio = 0;         // +inf on the deviation branch
};

PlateauGame play_plateau_game(const Remark2Output& game,
                              const std::function<Trajectory(const Instance&)>& algorithm,
                              double track_tol = 1e-7);

}  // namespace irobd
