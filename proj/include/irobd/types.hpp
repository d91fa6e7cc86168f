#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace irobd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when an iterative solver exhausts its budget. Carries the last
/// iterate and the residual gradient norm so callers can diagnose or restart.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(std::string what, Vec last_iterate, double residual, int step = -1)
      : std::runtime_error(std::move(what)),
        last_iterate(std::move(last_iterate)),
        residual(residual),
        step(step) {}

  Vec last_iterate;
  double residual;
  int step;  // round index when raised inside an online run, -1 otherwise
};

/// Thrown by the per-round information view when an algorithm reads data the
/// interaction protocol has not revealed yet.
class ProtocolViolation : public std::logic_error {
  using std::logic_error::logic_error;
};

class VerificationFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Quadratic geometry ½ xᵀQx, minimum 0 at the origin.
// ---------------------------------------------------------------------------

/// Strictly convex quadratic form. Isotropic instances keep only the scalar
/// curvature so evaluation and shifted solves stay O(d).
class Quadratic {
 public:
  Quadratic() = default;

  static Quadratic isotropic(int dim, double curvature);
  static Quadratic dense(Mat q);

  int dim() const { return dim_; }
  bool is_isotropic() const { return q_.size() == 0; }
  double iso() const { return iso_; }
  const Mat& matrix() const { return q_; }

  double value(const Vec& x) const;
  Vec apply(const Vec& x) const;  // Qx
  Vec gradient(const Vec& x) const { return apply(x); }

  /// Solves (Q + shift·I) y = rhs. shift must keep the system positive definite.
  Vec solve_shifted(double shift, const Vec& rhs) const;

  double min_curvature() const { return emin_; }
  double max_curvature() const { return emax_; }

 private:
  int dim_ = 0;
  double iso_ = 0.0;
  Mat q_;  // empty when isotropic
  double emin_ = 0.0;
  double emax_ = 0.0;
};

/// One round's hitting cost f_t(y) = h_t(y − v_t) with h_t a Quadratic.
struct HittingCost {
  Quadratic geometry;
  Vec minimizer;
  int reveal_round = 0;  // round at which the minimizer becomes known (t + k)

  int dim() const { return geometry.dim(); }
  double value(const Vec& y) const;
};

// ---------------------------------------------------------------------------
// Switching cost ½‖y_t − δ(y_{t−1:t−p})‖².
// ---------------------------------------------------------------------------

/// Memory map δ taking the previous p decisions to a target point.
/// Window convention throughout: mem[0] = y_{t−1}, …, mem[p−1] = y_{t−p}.
class SwitchingCost {
 public:
  enum class Kind { Linear, AffineDrone, PlateauSine, Callback };

  using DeltaFn = std::function<Vec(const std::vector<Vec>&)>;
  using JacobianFn = std::function<Mat(const std::vector<Vec>&, int)>;

  SwitchingCost() = default;

  /// δ(mem) = Σ_i C_i · mem[i−1]; slot constants are the spectral norms.
  static SwitchingCost linear(std::vector<Mat> maps);

  /// 1-D velocity map δ(y) = y − (c1 + c2·|y|·y); the declared slot constant
  /// 1 + 2·c2·box is valid on the stated operating box |y| ≤ box.
  static SwitchingCost affine_drone(double c1, double c2, double box);

  /// 1-D plateau/sine/plateau deviation: δ(y) = y + s·base(y/s) where base is
  /// eps on (−∞, nε], a half-period sine ramp down to −eps on a width-γε
  /// segment, and −eps beyond. Slot constant of the total map: 1 + π/γ.
  static SwitchingCost plateau_sine(double eps, double gamma, int n, double scale);

  /// Arbitrary callback with declared per-slot Lipschitz constants. An
  /// analytic slot Jacobian may be supplied; finite differences otherwise.
  static SwitchingCost callback(int dim, int memory, DeltaFn fn,
                                std::vector<double> lipschitz,
                                JacobianFn jacobian = nullptr);

  Kind kind() const { return kind_; }
  int memory() const { return p_; }
  int dim() const { return d_; }

  Vec delta(const std::vector<Vec>& mem) const;
  /// ∂δ/∂mem[slot], a d×d matrix. Analytic for the named kinds.
  Mat delta_jacobian(const std::vector<Vec>& mem, int slot) const;

  double lipschitz(int slot) const { return lipschitz_.at(slot); }
  const std::vector<double>& lipschitz_all() const { return lipschitz_; }
  /// Aggregate Σ_i L_i (spectral-norm sum for the linear kind).
  double alpha() const;
  double max_lipschitz() const;

  bool is_linear() const { return kind_ == Kind::Linear; }
  const std::vector<Mat>& linear_maps() const;

  /// States worth representing exactly in a 1-D brute-force grid
  /// (plateau boundaries and the like); empty for most kinds.
  std::vector<double> grid_anchors() const;

  // Parameters of the named kinds (throws if the kind does not match).
  double drone_c1() const;
  double drone_c2() const;
  double drone_box() const;
  double sine_eps() const;
  double sine_gamma() const;
  int sine_n() const;
  double sine_scale() const;

 private:
  Kind kind_ = Kind::Linear;
  int p_ = 0;
  int d_ = 0;
  std::vector<Mat> maps_;
  std::vector<double> lipschitz_;
  DeltaFn fn_;
  JacobianFn jac_;
  double c1_ = 0, c2_ = 0, box_ = 0;           // AffineDrone
  double eps_ = 0, gamma_ = 0, scale_ = 1;     // PlateauSine
  int n_ = 0;

  double scalar_delta(double y) const;     // 1-D named kinds
  double scalar_slope(double y) const;
};

// ---------------------------------------------------------------------------
// Instance, trajectory, cost report.
// ---------------------------------------------------------------------------

/// A full problem: horizon, dimension, feedback delay, per-round hitting
/// costs, the switching cost, and the p pre-game decisions y_0, y_{−1}, ….
struct Instance {
  int T = 0;
  int d = 0;
  int k = 0;
  std::vector<HittingCost> costs;   // index t−1 holds round t
  SwitchingCost switching;
  std::vector<Vec> prehistory;      // prehistory[0] = y_0, [1] = y_{−1}, …

  double m = 0;  // min curvature over all rounds
  double l = 0;  // max curvature

  /// Fills reveal rounds and the (m, l) envelope, then validates.
  void finalize();
  void validate() const;

  const HittingCost& cost(int t) const { return costs.at(t - 1); }
  /// y_t for t ≤ 0, drawn from the prehistory.
  const Vec& past(int t) const;
};

struct Trajectory {
  std::vector<Vec> points;  // y_1 … y_T
  std::string label;

  int length() const { return static_cast<int>(points.size()); }
};

/// Per-step hitting and switching cost decomposition.
struct CostReport {
  std::vector<double> hitting;
  std::vector<double> switching;
  double total = 0;
};

}  // namespace irobd
