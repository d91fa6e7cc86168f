#pragma once

#include "irobd/types.hpp"

namespace irobd {

struct SolverConfig {
  enum class Method { Auto, ClosedForm, Iterative };

  double grad_tol = 1e-10;
  int max_iters = 10000;
  double shrink = 0.5;               // backtracking factor
  double sufficient_decrease = 1e-4; // Armijo constant
  Method method = Method::Auto;      // Auto resolves to the closed form

  void validate() const;
};

/// argmin_y h(y − v) + λ1·½‖y − δ(mem)‖² + (λ2/2)‖y − v‖².
/// Closed form: y = (Q + (λ1+λ2)I)⁻¹ (Qv + λ1·δ(mem) + λ2·v).
Vec robd_minimize(const Quadratic& h, const Vec& v, const SwitchingCost& sw,
                  const std::vector<Vec>& mem, double lambda1, double lambda2,
                  const SolverConfig& cfg = {});

Vec robd_minimize(const HittingCost& f, const SwitchingCost& sw, const std::vector<Vec>& mem,
                  double lambda1, double lambda2, const SolverConfig& cfg = {});

/// The optimistic estimate argmin_v min_y h(y − v) + λ·c(y, mem). The inner
/// value is non-negative and vanishes at v = δ(mem), which is therefore the
/// unique minimizer; returned directly.
Vec estimate_minimizer(const Quadratic& h, const SwitchingCost& sw, const std::vector<Vec>& mem,
                       double lambda, const SolverConfig& cfg = {});

/// Test oracle for estimate_minimizer: gradient descent on
/// ψ(v) = min_y h(y−v) + λc(y,mem) via the envelope gradient −∇h(y*(v) − v).
Vec estimate_minimizer_nested_oracle(const Quadratic& h, const SwitchingCost& sw,
                                     const std::vector<Vec>& mem, double lambda,
                                     const SolverConfig& cfg = {});

struct ProxValue {
  Vec y;
  double value;
};

/// Evaluates ψ(v) = min_y h(y − v) + λ·c(y, mem) and its inner argmin.
ProxValue min_over_y_value(const Quadratic& h, const SwitchingCost& sw,
                           const std::vector<Vec>& mem, const Vec& v, double lambda,
                           const SolverConfig& cfg = {});

}  // namespace irobd
