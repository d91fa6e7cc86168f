#include "irobd/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "irobd/core.hpp"
#include "irobd/rng.hpp"

namespace irobd {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Trajectory make_traj(std::vector<Vec> pts, std::string label) {
  Trajectory t;
  t.points = std::move(pts);
  t.label = std::move(label);
  return t;
}

// Gradient of the joint objective in the stacked trajectory.
void joint_gradient(const Instance& inst, const std::vector<Vec>& y, std::vector<Vec>& grad) {
  const int p = inst.switching.memory();
  grad.assign(inst.T, Vec::Zero(inst.d));
  for (int t = 1; t <= inst.T; ++t) {
    const Vec& yt = y[t - 1];
    grad[t - 1] += inst.cost(t).geometry.apply(yt - inst.cost(t).minimizer);
    std::vector<Vec> mem = memory_window(inst, y, t);
    Vec resid = yt - inst.switching.delta(mem);
    grad[t - 1] += resid;
    for (int i = 1; i <= p; ++i) {
      const int s = t - i;
      if (s >= 1) grad[s - 1] -= inst.switching.delta_jacobian(mem, i - 1).transpose() * resid;
    }
  }
}

double joint_grad_norm(const std::vector<Vec>& grad) {
  double sq = 0;
  for (const Vec& g : grad) sq += g.squaredNorm();
  return std::sqrt(sq);
}

}  // namespace

double offline_objective(const Instance& inst, const Trajectory& traj) {
  return evaluate_total(inst, traj).total;
}

// --------------------------- Exact convex solve -----------------------------

Trajectory solve_offline_convex(const Instance& inst, const SolverConfig& cfg) {
  require(inst.switching.is_linear(), "solve_offline_convex: linear memory map required");
  const int T = inst.T, d = inst.d, p = inst.switching.memory();
  const int n = T * d;
  const auto& C = inst.switching.linear_maps();

  Mat H = Mat::Zero(n, n);
  Vec rhs = Vec::Zero(n);

  // Hitting blocks.
  for (int t = 1; t <= T; ++t) {
    const Quadratic& g = inst.cost(t).geometry;
    Mat Q = g.is_isotropic() ? Mat(g.iso() * Mat::Identity(d, d)) : g.matrix();
    H.block((t - 1) * d, (t - 1) * d, d, d) += Q;
    rhs.segment((t - 1) * d, d) += Q * inst.cost(t).minimizer;
  }

  // Switching blocks: residual r_t = y_t − Σ_i C_i y_{t−i} − b_t where the
  // prehistory contributes the constant b_t.
  for (int t = 1; t <= T; ++t) {
    std::vector<std::pair<int, Mat>> terms;  // (trajectory index, coefficient)
    terms.push_back({t, Mat::Identity(d, d)});
    Vec b = Vec::Zero(d);
    for (int i = 1; i <= p; ++i) {
      const int s = t - i;
      if (s >= 1) {
        terms.push_back({s, Mat(-C[i - 1])});
      } else {
        b += C[i - 1] * inst.past(s);
      }
    }
    for (const auto& [ti, Ai] : terms) {
      rhs.segment((ti - 1) * d, d) += Ai.transpose() * b;
      for (const auto& [tj, Aj] : terms)
        H.block((ti - 1) * d, (tj - 1) * d, d, d) += Ai.transpose() * Aj;
    }
  }

  Vec sol = H.ldlt().solve(rhs);

  std::vector<Vec> pts(T);
  for (int t = 0; t < T; ++t) pts[t] = sol.segment(t * d, d);

  // Stationarity audit of the factorized solve.
  std::vector<Vec> grad;
  joint_gradient(inst, pts, grad);
  const double gnorm = joint_grad_norm(grad);
  const double tol = cfg.grad_tol * std::sqrt(static_cast<double>(n)) *
                     std::max(1.0, rhs.norm());
  if (gnorm > tol)
    throw SolverFailure("solve_offline_convex: stationarity check failed", sol, gnorm);
  return make_traj(std::move(pts), "offline-convex");
}

// --------------------------- Grid dynamic program ---------------------------

Trajectory solve_offline_dp(const Instance& inst, GridSpec grid) {
  require(inst.d == 1, "solve_offline_dp: 1-D instances only");
  const int p = inst.switching.memory();
  if (p > 2)
    throw std::invalid_argument("solve_offline_dp: memory length > 2 unsupported, use multistart");
  require(grid.cells >= 3, "solve_offline_dp: need at least 3 cells");

  if (grid.auto_bracket) {
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (const HittingCost& c : inst.costs) {
      vmin = std::min(vmin, c.minimizer[0]);
      vmax = std::max(vmax, c.minimizer[0]);
    }
    for (const Vec& y : inst.prehistory) {
      vmin = std::min(vmin, y[0]);
      vmax = std::max(vmax, y[0]);
    }
    double range = vmax - vmin;
    if (range <= 0) range = std::max(1.0, std::abs(vmax));
    grid.lo = vmin - 3.0 * range;
    grid.hi = vmax + 3.0 * range;
  }
  require(grid.lo < grid.hi, "solve_offline_dp: bracket must be non-degenerate");

  // Uniform grid plus exact anchors (minimizers, prehistory, map landmarks).
  std::vector<double> states;
  states.reserve(grid.cells + inst.T + 8);
  const double width = (grid.hi - grid.lo) / (grid.cells - 1);
  for (int j = 0; j < grid.cells; ++j) states.push_back(grid.lo + j * width);
  for (const HittingCost& c : inst.costs) states.push_back(c.minimizer[0]);
  for (const Vec& y : inst.prehistory) states.push_back(y[0]);
  for (double a : inst.switching.grid_anchors()) states.push_back(a);
  for (double a : grid.anchors) states.push_back(a);
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  states.erase(std::remove_if(states.begin(), states.end(),
                              [&](double s) { return s < grid.lo - 1e-12 || s > grid.hi + 1e-12; }),
               states.end());
  const int N = static_cast<int>(states.size());

  const double table_bytes = (p == 1 ? 1.0 : static_cast<double>(N)) * N * 8.0 * 3.0;
  if (table_bytes > 2.0e9) {
    std::ostringstream msg;
    msg << "solve_offline_dp: table would need about " << table_bytes
        << " bytes; reduce cells or memory length";
    throw std::invalid_argument(msg.str());
  }

  auto wrap = [](double x) {
    Vec v(1);
    v[0] = x;
    return v;
  };
  auto hit = [&](int t, double x) { return inst.cost(t).value(wrap(x)); };
  auto delta1 = [&](double prev) { return inst.switching.delta({wrap(prev)})[0]; };
  auto delta2 = [&](double prev, double prev2) {
    return inst.switching.delta({wrap(prev), wrap(prev2)})[0];
  };

  const double y0 = inst.past(0)[0];

  if (p == 1) {
    std::vector<double> deltas(N);
    for (int j = 0; j < N; ++j) deltas[j] = delta1(states[j]);

    std::vector<double> best(N);
    std::vector<std::vector<int>> arg(inst.T, std::vector<int>(N, -1));
    {
      const double d0 = delta1(y0);
      for (int j = 0; j < N; ++j) best[j] = hit(1, states[j]) + 0.5 * (states[j] - d0) * (states[j] - d0);
    }
    std::vector<double> next(N);
    for (int t = 2; t <= inst.T; ++t) {
      for (int j = 0; j < N; ++j) {
        double b = std::numeric_limits<double>::infinity();
        int bi = -1;
        const double yj = states[j];
        for (int i = 0; i < N; ++i) {
          const double c = best[i] + 0.5 * (yj - deltas[i]) * (yj - deltas[i]);
          if (c < b) {
            b = c;
            bi = i;
          }
        }
        next[j] = b + hit(t, yj);
        arg[t - 1][j] = bi;
      }
      best.swap(next);
    }
    int j = static_cast<int>(std::min_element(best.begin(), best.end()) - best.begin());
    std::vector<Vec> pts(inst.T);
    for (int t = inst.T; t >= 1; --t) {
      pts[t - 1] = wrap(states[j]);
      if (t >= 2) j = arg[t - 1][j];
    }
    return make_traj(std::move(pts), "offline-dp");
  }

  // p == 2: state (y_{t−1}, y_{t−2}) flattened row-major.
  const double ym1 = inst.past(-1)[0];
  std::vector<double> best(static_cast<size_t>(N) * N, std::numeric_limits<double>::infinity());
  std::vector<std::vector<int>> arg(inst.T);
  {
    const double d0 = delta2(y0, ym1);
    // After step 1 the state is (y_1, y_0); y_0 is off-grid, so the first two
    // layers are handled explicitly.
    std::vector<double> layer1(N);
    for (int j = 0; j < N; ++j)
      layer1[j] = hit(1, states[j]) + 0.5 * (states[j] - d0) * (states[j] - d0);
    if (inst.T == 1) {
      int j = static_cast<int>(std::min_element(layer1.begin(), layer1.end()) - layer1.begin());
      return make_traj({wrap(states[j])}, "offline-dp");
    }
    for (int j = 0; j < N; ++j) {    // y_2 index
      for (int i = 0; i < N; ++i) {  // y_1 index
        const double d = delta2(states[i], y0);
        best[static_cast<size_t>(j) * N + i] =
            layer1[i] + hit(2, states[j]) + 0.5 * (states[j] - d) * (states[j] - d);
      }
    }
  }
  std::vector<double> next(static_cast<size_t>(N) * N);
  for (int t = 3; t <= inst.T; ++t) {
    arg[t - 1].assign(static_cast<size_t>(N) * N, -1);
    std::fill(next.begin(), next.end(), std::numeric_limits<double>::infinity());
    for (int j = 0; j < N; ++j) {    // new point y_t
      const double yj = states[j];
      const double h = hit(t, yj);
      for (int i = 0; i < N; ++i) {  // y_{t−1}
        double b = std::numeric_limits<double>::infinity();
        int bi = -1;
        for (int q = 0; q < N; ++q) {  // y_{t−2}
          const double d = delta2(states[i], states[q]);
          const double c = best[static_cast<size_t>(i) * N + q] + 0.5 * (yj - d) * (yj - d);
          if (c < b) {
            b = c;
            bi = q;
          }
        }
        next[static_cast<size_t>(j) * N + i] = b + h;
        arg[t - 1][static_cast<size_t>(j) * N + i] = bi;
      }
    }
    best.swap(next);
  }
  size_t flat = std::min_element(best.begin(), best.end()) - best.begin();
  int j = static_cast<int>(flat / N), i = static_cast<int>(flat % N);
  std::vector<Vec> pts(inst.T);
  for (int t = inst.T; t >= 1; --t) {
    pts[t - 1] = wrap(states[j]);
    if (t >= 3) {
      const int q = arg[t - 1][static_cast<size_t>(j) * N + i];
      j = i;
      i = q;
    } else if (t == 2) {
      j = i;
    }
  }
  return make_traj(std::move(pts), "offline-dp");
}

// --------------------------- Multistart descent -----------------------------

namespace {

// Descends the joint objective from a seed; returns the final trajectory and
// its cost. Failures to converge surface as the best point found.
std::pair<std::vector<Vec>, double> descend_joint(const Instance& inst, std::vector<Vec> y,
                                                  const SolverConfig& cfg) {
  const double curv = inst.l + 1.0 + 2.0 * inst.switching.alpha() * inst.switching.alpha();
  Trajectory tmp;
  tmp.points = y;
  double fy = offline_objective(inst, tmp);
  std::vector<Vec> grad;
  const double tol = cfg.grad_tol * std::sqrt(static_cast<double>(inst.T * inst.d));
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    joint_gradient(inst, y, grad);
    const double gnorm = joint_grad_norm(grad);
    if (gnorm <= tol) break;
    double step = 1.0 / curv;
    bool moved = false;
    for (int back = 0; back < 60; ++back) {
      std::vector<Vec> trial(inst.T);
      for (int t = 0; t < inst.T; ++t) trial[t] = y[t] - step * grad[t];
      tmp.points = trial;
      const double ft = offline_objective(inst, tmp);
      if (ft <= fy - cfg.sufficient_decrease * step * gnorm * gnorm) {
        y = std::move(trial);
        fy = ft;
        moved = true;
        break;
      }
      step *= cfg.shrink;
    }
    if (!moved) break;
  }
  return {std::move(y), fy};
}

}  // namespace

Trajectory solve_offline_multistart(const Instance& inst, int restarts, uint64_t seed,
                                    const SolverConfig& cfg,
                                    const std::vector<Trajectory>& extra_seeds) {
  require(restarts >= 1, "solve_offline_multistart: restarts must be >= 1");
  Rng rng(seed);

  std::vector<std::vector<Vec>> seeds;
  seeds.push_back(minimizer_trajectory(inst).points);
  seeds.push_back(rollout_trajectory(inst).points);
  for (const Trajectory& t : extra_seeds) {
    require(t.length() == inst.T, "solve_offline_multistart: seed trajectory length mismatch");
    seeds.push_back(t.points);
  }
  double spread = 0.0;
  for (const HittingCost& c : inst.costs) spread = std::max(spread, c.minimizer.norm());
  spread = std::max(spread, 1.0);
  while (static_cast<int>(seeds.size()) < restarts) {
    const auto& base = seeds[rng.uniform_int(0, 1)];
    std::vector<Vec> pert(inst.T);
    const double scale = rng.uniform(0.05, 0.6) * spread;
    for (int t = 0; t < inst.T; ++t) pert[t] = base[t] + rng.normal_vec(inst.d) * scale;
    seeds.push_back(std::move(pert));
  }
  if (static_cast<int>(seeds.size()) > restarts)
    seeds.resize(std::max<size_t>(restarts, 2 + extra_seeds.size()));

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<Vec> best;
  // Strict improvement only, so the lowest seed index wins ties and the
  // reduction is deterministic.
  for (const auto& s : seeds) {
    auto [pts, cost] = descend_joint(inst, s, cfg);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(pts);
    }
  }
  return make_traj(std::move(best), "offline-multistart");
}

OracleResult solve_offline(const Instance& inst, const SolverConfig& cfg, int restarts,
                           uint64_t seed) {
  OracleResult out;
  if (inst.switching.is_linear()) {
    out.trajectory = solve_offline_convex(inst, cfg);
    out.method = "convex";
  } else if (inst.d == 1 && inst.switching.memory() <= 2) {
    out.trajectory = solve_offline_dp(inst);
    out.method = "dp";
  } else {
    out.trajectory = solve_offline_multistart(inst, restarts, seed, cfg);
    out.method = "multistart";
  }
  out.cost = offline_objective(inst, out.trajectory);
  return out;
}

}  // namespace irobd
