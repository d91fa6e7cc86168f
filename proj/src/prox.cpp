#include "irobd/prox.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace irobd {

namespace {

/// Gradient descent with backtracking line search. Step initialized at
/// 1/curvature_bound each iteration; objectives here are smooth and strongly
/// convex, so this is all that is needed at the dimensions we run.
Vec descend(const std::function<double(const Vec&)>& value,
            const std::function<Vec(const Vec&)>& gradient, Vec x, double curvature_bound,
            const SolverConfig& cfg) {
  double fx = value(x);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    Vec g = gradient(x);
    const double gnorm = g.norm();
    if (gnorm <= cfg.grad_tol) return x;
    double step = 1.0 / curvature_bound;
    for (int back = 0; back < 80; ++back) {
      Vec trial = x - step * g;
      double ft = value(trial);
      // The noise term keeps the search from stalling once true decreases
      // drop below the resolution of the objective value.
      const double noise = 1e-14 * (std::abs(fx) + std::abs(ft));
      if (ft <= fx - cfg.sufficient_decrease * step * gnorm * gnorm + noise) {
        x = std::move(trial);
        fx = ft;
        break;
      }
      step *= cfg.shrink;
    }
  }
  Vec g = gradient(x);
  if (g.norm() <= cfg.grad_tol) return x;
  std::ostringstream msg;
  msg << "prox solver failed to reach gradient tolerance " << cfg.grad_tol << " within "
      << cfg.max_iters << " iterations (residual " << g.norm() << ")";
  throw SolverFailure(msg.str(), x, g.norm());
}

}  // namespace

void SolverConfig::validate() const {
  if (!(grad_tol > 0)) throw std::invalid_argument("SolverConfig: grad_tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(shrink > 0 && shrink < 1)) throw std::invalid_argument("SolverConfig: bad shrink factor");
  if (!(sufficient_decrease > 0 && sufficient_decrease < 1))
    throw std::invalid_argument("SolverConfig: bad sufficient-decrease constant");
}

Vec robd_minimize(const Quadratic& h, const Vec& v, const SwitchingCost& sw,
                  const std::vector<Vec>& mem, double lambda1, double lambda2,
                  const SolverConfig& cfg) {
  cfg.validate();
  if (lambda1 < 0 || lambda2 < 0)
    throw std::invalid_argument("robd_minimize: regularization weights must be >= 0");
  if (v.size() != h.dim()) throw std::invalid_argument("robd_minimize: dimension mismatch");
  if (!(lambda1 + h.min_curvature() > 0))
    throw std::invalid_argument("robd_minimize: objective is not strongly convex");

  const Vec target = sw.delta(mem);
  if (cfg.method != SolverConfig::Method::Iterative) {
    Vec rhs = h.apply(v) + lambda1 * target + lambda2 * v;
    return h.solve_shifted(lambda1 + lambda2, rhs);
  }

  auto value = [&](const Vec& y) {
    return h.value(y - v) + 0.5 * lambda1 * (y - target).squaredNorm() +
           0.5 * lambda2 * (y - v).squaredNorm();
  };
  auto gradient = [&](const Vec& y) {
    return Vec(h.apply(y - v) + lambda1 * (y - target) + lambda2 * (y - v));
  };
  return descend(value, gradient, v, h.max_curvature() + lambda1 + lambda2, cfg);
}

Vec robd_minimize(const HittingCost& f, const SwitchingCost& sw, const std::vector<Vec>& mem,
                  double lambda1, double lambda2, const SolverConfig& cfg) {
  return robd_minimize(f.geometry, f.minimizer, sw, mem, lambda1, lambda2, cfg);
}

Vec estimate_minimizer(const Quadratic& h, const SwitchingCost& sw, const std::vector<Vec>& mem,
                       double lambda, const SolverConfig& cfg) {
  cfg.validate();
  if (!(lambda > 0)) throw std::invalid_argument("estimate_minimizer: lambda must be positive");
  if (h.gradient(Vec::Zero(h.dim())).norm() > cfg.grad_tol)
    throw std::invalid_argument("estimate_minimizer: geometry minimum must sit at the origin");
  // ψ(v) = min_y h(y−v) + λc(y,mem) is non-negative and vanishes at
  // v = δ(mem) (take y = δ(mem)); strict convexity of ψ makes that the
  // unique minimizer.
  return sw.delta(mem);
}

Vec estimate_minimizer_nested_oracle(const Quadratic& h, const SwitchingCost& sw,
                                     const std::vector<Vec>& mem, double lambda,
                                     const SolverConfig& cfg) {
  cfg.validate();
  auto psi_arg = [&](const Vec& v) {
    return robd_minimize(h, v, sw, mem, lambda, 0.0, cfg);
  };
  auto value = [&](const Vec& v) {
    Vec y = psi_arg(v);
    return h.value(y - v) + 0.5 * lambda * (y - sw.delta(mem)).squaredNorm();
  };
  auto gradient = [&](const Vec& v) {
    // Envelope gradient: the inner argmin is unique, so ∇ψ(v) = −∇h(y* − v).
    Vec y = psi_arg(v);
    return Vec(-h.gradient(y - v));
  };
  Vec start = Vec::Zero(h.dim());
  return descend(value, gradient, start, h.max_curvature() + lambda, cfg);
}

ProxValue min_over_y_value(const Quadratic& h, const SwitchingCost& sw,
                           const std::vector<Vec>& mem, const Vec& v, double lambda,
                           const SolverConfig& cfg) {
  Vec y = robd_minimize(h, v, sw, mem, lambda, 0.0, cfg);
  const double value = h.value(y - v) + 0.5 * lambda * (y - sw.delta(mem)).squaredNorm();
  return {std::move(y), value};
}

}  // namespace irobd
