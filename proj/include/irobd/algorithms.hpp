#pragma once

#include <optional>

#include "irobd/prox.hpp"
#include "irobd/types.hpp"

namespace irobd {

/// Per-round information gate over an instance. At round t the geometry of
/// rounds 1..t and the minimizers of rounds 1..t−k are readable; anything
/// else faults. Online algorithms run against this view, so protocol
/// legality is structural rather than by convention.
class ProtocolView {
 public:
  explicit ProtocolView(const Instance& inst) : inst_(inst) {}

  /// Advances to round t (monotone).
  void begin_round(int t);
  int round() const { return round_; }

  const Quadratic& geometry(int s) const;
  const Vec& minimizer(int s) const;
  /// Full cost of round s; legal only once its minimizer has been revealed.
  HittingCost revealed_cost(int s) const;

  const Instance& instance() const { return inst_; }

 private:
  const Instance& inst_;
  int round_ = 0;
};

/// Per-delay decision rows from re-running the estimation recursion at every
/// delay 0..k. decisions[j][t−1] is the decision a j-step-delay run makes at
/// round t; estimates[j][t−1] the matching minimizer estimate (row 0 holds
/// the true minimizers).
struct DelaySweep {
  std::vector<std::vector<Vec>> decisions;
  std::vector<std::vector<Vec>> estimates;

  int delays() const { return static_cast<int>(decisions.size()) - 1; }
};

struct IrobdResult {
  Trajectory trajectory;
  DelaySweep sweep;
};

/// Balanced-descent step stream with delayed minimizer reveals. Feed rounds
/// in order; each step returns the decision for the current round.
class IrobdOnline {
 public:
  IrobdOnline(SwitchingCost sw, std::vector<Vec> prehistory, int delay, double lambda,
              SolverConfig cfg = {});

  /// Round t supplies the geometry h_t and, when t > delay, the minimizer of
  /// round t − delay.
  Vec step(const Quadratic& geometry, const std::optional<Vec>& revealed_minimizer);

  int round() const { return t_; }

 private:
  SwitchingCost sw_;
  std::vector<Vec> prehistory_;
  int delay_;
  double lambda_;
  SolverConfig cfg_;
  int t_ = 0;
  std::vector<Quadratic> geometries_;  // h_1..h_t
  std::vector<Vec> minimizers_;        // v_1..v_{t−delay}
  std::vector<Vec> oracle_;            // no-delay decisions on revealed costs

  std::vector<Vec> window(const std::vector<Vec>& seq, int t) const;
};

/// No-delay regularized balanced descent: each round minimizes the hitting
/// cost plus λ1-weighted switching cost (plus an optional λ2 pull to the
/// minimizer). Requires k = 0.
Trajectory run_robd(const Instance& inst, double lambda1, double lambda2 = 0.0,
                    const SolverConfig& cfg = {});

/// Delay-k run: replays the no-delay decisions on every revealed cost, then
/// fills the k unrevealed rounds with optimistic estimates, one round at a
/// time. Information access goes through ProtocolView.
IrobdResult run_irobd(const Instance& inst, double lambda, const SolverConfig& cfg = {});

/// Move-to-minimizer with delay: y_t = y_0 for t ≤ k, else v_{t−k}.
/// Only valid for unit-map single-step memory (the plain smoothed setting).
Trajectory run_delayed_m2m(const Instance& inst, const SolverConfig& cfg = {});

/// y_t = y_0 for all t.
Trajectory run_stay(const Instance& inst);

/// Runs the estimation recursion for every delay 0..inst.k on the same
/// instance, recording decisions and estimates for inequality audits.
DelaySweep delay_sweep(const Instance& inst, double lambda, const SolverConfig& cfg = {});

}  // namespace irobd
