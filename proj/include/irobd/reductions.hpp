#pragma once

#include <functional>

#include "irobd/algorithms.hpp"
#include "irobd/types.hpp"

namespace irobd {

// ---------------------------------------------------------------------------
// Linear plant in controllable canonical form.
// ---------------------------------------------------------------------------

/// x_{t+1} = A x_t + B u_t + w_t with (A, B) in controllable canonical form:
/// B has unit rows exactly at the block-end indices, every other row of A is
/// a superdiagonal shift row. State cost weights q_0..q_{T+p−1} (one extra
/// block of weights beyond the horizon covers register cells that drain
/// after the last action), disturbances w_0..w_{T−1}.
struct LinearControlSystem {
  Mat A;
  Mat B;
  std::vector<Vec> w;
  std::vector<double> q;
  Vec x0;

  int n() const { return static_cast<int>(A.rows()); }
  int horizon() const { return static_cast<int>(w.size()); }
};

/// Block structure of a canonical pair: 1-based end indices k_1 < … < k_d = n
/// of the input rows, block lengths p_i = k_i − k_{i−1}, and the
/// controllability index p = max p_i.
struct CanonicalIndices {
  std::vector<int> k;    // 1-based
  std::vector<int> p_i;
  int p = 0;
  int n = 0;
  int d = 0;

  /// ψ(x): the input-row coordinates (x^{(k_1)}, …, x^{(k_d)}).
  Vec select(const Vec& x) const;
};

/// Validates the canonical structure and derives the block indices.
/// Reports the first offending row when the structure is violated.
CanonicalIndices canonical_indices(const Mat& A, const Mat& B);

/// The d×d memory maps read off A: map i entry (h, j) is A(k_h, k_j+1−i)
/// when i ≤ p_j and zero otherwise.
std::vector<Mat> extract_memory_maps(const Mat& A, const CanonicalIndices& idx);

/// Accumulated disturbance feeding state coordinate k_i+1−j at time t:
/// Σ_{τ=t+1−j}^{t−1} w_τ^{(k_i−τ+t−j)} for j ≥ 2, zero for j = 1.
/// τ outside the supplied history is an error.
double accumulated_disturbance(const std::vector<Vec>& w, const CanonicalIndices& idx, int t,
                               int i, int j);

/// Reduction output. The emitted instance has memory p, delay p, zero-mean
/// hitting costs; per-step action-independent constants (the weighted spread
/// of the accumulated disturbances across register cells) cannot live inside
/// a cost of the form h_t(y − v_t) and are carried here instead.
struct LinearReduction {
  Instance instance;
  CanonicalIndices idx;
  std::vector<Mat> maps;               // C_1..C_p
  std::vector<Vec> zeta;               // ζ_0..ζ_{T−1}
  std::vector<double> hitting_offsets; // per OCO round

  std::vector<Vec> y_from_u(const std::vector<Vec>& u) const;
  std::vector<Vec> u_from_y(const std::vector<Vec>& y) const;
  double offset_total() const;
};

LinearReduction reduce_linear(const LinearControlSystem& sys);

/// The plant-side cost matching the reduction's accounting: each action's
/// register cells are charged with their weights q_{t+j}; cells written only
/// by pre-horizon disturbances are excluded and cells draining after the
/// horizon are included. Coincides with Σ (q_t/2)‖x_t‖² + Σ ½‖u_t‖² away
/// from the first and last p−1 steps.
double control_cost(const LinearControlSystem& sys, const std::vector<Vec>& u);

// ---------------------------------------------------------------------------
// Nonlinear plant.
// ---------------------------------------------------------------------------

/// x_{t+1} = A x_t + u_t + g(x_t) with tracking costs
/// ½(x_t − v_t)ᵀ Q_t (x_t − v_t); targets revealed with delay k.
struct NonlinearControlSystem {
  Mat A;
  std::function<Vec(const Vec&)> g;
  std::function<Mat(const Vec&)> g_jacobian;  // optional, finite differences otherwise
  double lipschitz = 0;  // declared constant of x ↦ Ax + g(x)
  std::vector<Mat> Q;
  std::vector<Vec> targets;
  int delay = 0;
  Vec x0;

  int n() const { return static_cast<int>(A.rows()); }
  int horizon() const { return static_cast<int>(targets.size()); }
};

struct NonlinearReduction {
  Instance instance;

  std::vector<Vec> y_from_u(const NonlinearControlSystem& sys, const std::vector<Vec>& u) const;
  std::vector<Vec> u_from_y(const NonlinearControlSystem& sys, const std::vector<Vec>& y) const;
};

NonlinearReduction reduce_nonlinear(const NonlinearControlSystem& sys);

double control_cost(const NonlinearControlSystem& sys, const std::vector<Vec>& u);

// ---------------------------------------------------------------------------
// Round-trip verification and online drivers.
// ---------------------------------------------------------------------------

struct EquivalenceReport {
  double control_cost = 0;
  double oco_cost = 0;  // instance cost plus carried offsets
  double abs_diff = 0;
  double rel_diff = 0;
  double state_identity_err = 0;   // max ‖ψ(x_{t+1}) − (y_t + ζ_t)‖
  double decomposition_err = 0;    // max over the register-cell identity
  int first_bad_step = -1;
  bool ok = false;
};

/// Simulates the plant under an action sequence and compares both cost
/// accountings; also audits the state and register-cell identities.
EquivalenceReport roundtrip_verify(const LinearControlSystem& sys, const std::vector<Vec>& u,
                                   double tol = 1e-8);
EquivalenceReport roundtrip_verify(const NonlinearControlSystem& sys, const std::vector<Vec>& u,
                                   double tol = 1e-8);

struct ControlRun {
  std::vector<Vec> states;   // x_0..x_T (x beyond only simulated internally)
  std::vector<Vec> actions;  // u_0..u_{T−1}
  std::vector<Vec> decisions;
  double cost = 0;
};

/// Runs the delayed balanced-descent stream as the plant controller, feeding
/// it exactly what each round observes (states, weights, and the targets
/// recoverable from already-seen disturbances).
ControlRun run_linear_control(const LinearControlSystem& sys, double lambda,
                              const SolverConfig& cfg = {});
ControlRun run_nonlinear_control(const NonlinearControlSystem& sys, double lambda,
                                 const SolverConfig& cfg = {});

}  // namespace irobd
