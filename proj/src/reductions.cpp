#include "irobd/reductions.hpp"

#include <cmath>
#include <sstream>

#include "irobd/core.hpp"

namespace irobd {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

/// r(t,i,j) against a zero-extended history: indices below the start of time
/// contribute nothing, indices beyond the supplied span must not be reached.
double r_extended(const std::vector<Vec>& w, const CanonicalIndices& idx, int t, int i, int j) {
  if (j == 1) return 0.0;
  double sum = 0;
  for (int tau = t + 1 - j; tau <= t - 1; ++tau) {
    if (tau < 0) continue;
    const int coord = idx.k[i - 1] - tau + t - j;  // 1-based
    sum += w.at(tau)[coord - 1];
  }
  return sum;
}

/// ρ_slot(t): the vector whose block-j entry is r(t, j, slot), i.e. the
/// accumulated disturbances the slot-i memory map acts on alongside ζ_{t−i}.
Vec rho(const std::vector<Vec>& w, const CanonicalIndices& idx, int t, int slot) {
  Vec out = Vec::Zero(idx.d);
  for (int j = 1; j <= idx.d; ++j)
    if (slot <= idx.p_i[j - 1]) out[j - 1] = r_extended(w, idx, t, j, slot);
  return out;
}

/// ζ_0..ζ_{T−1}: accumulation of control noise. The recursion must absorb
/// the cross terms C_i·ρ_i(t) or ψ(x_{t+1}) = y_t + ζ_t fails whenever a
/// block is longer than one cell and the disturbance hits a shift row.
std::vector<Vec> zeta_sequence(const LinearControlSystem& sys, const CanonicalIndices& idx,
                               const std::vector<Mat>& maps, const std::vector<Vec>& wpad) {
  const int T = sys.horizon();
  std::vector<Vec> zeta(T, Vec::Zero(idx.d));
  for (int t = 0; t < T; ++t) {
    Vec z = idx.select(sys.w[t]);
    for (int i = 1; i <= idx.p; ++i) {
      Vec prev = (t - i >= 0) ? zeta[t - i] : Vec(Vec::Zero(idx.d));
      z += maps[i - 1] * (prev + rho(wpad, idx, t, i));
    }
    zeta[t] = z;
  }
  return zeta;
}

std::vector<Vec> padded_disturbances(const LinearControlSystem& sys, int p) {
  std::vector<Vec> wpad = sys.w;
  wpad.resize(sys.horizon() + p - 1, Vec::Zero(sys.n()));
  return wpad;
}

/// Per-coordinate weighted centers of the round-t quadratic. Returns the
/// minimizer and accumulates the action-independent spread constant.
Vec round_target(const CanonicalIndices& idx, const std::vector<double>& q,
                 const std::vector<Vec>& wpad, const Vec& zeta_t, int t, double* offset) {
  Vec v(idx.d);
  for (int i = 1; i <= idx.d; ++i) {
    double wsum = 0, mean = 0;
    for (int j = 1; j <= idx.p_i[i - 1]; ++j) {
      wsum += q.at(t + j);
      mean += q.at(t + j) * r_extended(wpad, idx, t + j, i, j);
    }
    mean /= wsum;
    v[i - 1] = -zeta_t[i - 1] - mean;
    if (offset) {
      for (int j = 1; j <= idx.p_i[i - 1]; ++j) {
        const double dev = r_extended(wpad, idx, t + j, i, j) - mean;
        *offset += 0.5 * q.at(t + j) * dev * dev;
      }
    }
  }
  return v;
}

Quadratic round_geometry(const CanonicalIndices& idx, const std::vector<double>& q, int t) {
  Vec diag(idx.d);
  for (int i = 1; i <= idx.d; ++i) {
    double wsum = 0;
    for (int j = 1; j <= idx.p_i[i - 1]; ++j) wsum += q.at(t + j);
    diag[i - 1] = wsum;
  }
  if ((diag.array() == diag[0]).all()) return Quadratic::isotropic(idx.d, diag[0]);
  return Quadratic::dense(Mat(diag.asDiagonal()));
}

/// States x_0..x_{T+p−1}; actions and disturbances are zero beyond the
/// horizon, which leaves the register cells charged by the cost untouched.
std::vector<Vec> simulate(const LinearControlSystem& sys, const std::vector<Vec>& u, int p) {
  const int T = sys.horizon();
  std::vector<Vec> x(T + p);
  x[0] = sys.x0;
  for (int t = 0; t < T + p - 1; ++t) {
    Vec next = sys.A * x[t];
    if (t < T) next += sys.B * u.at(t) + sys.w[t];
    x[t + 1] = next;
  }
  return x;
}

void validate_linear_inputs(const LinearControlSystem& sys, const CanonicalIndices& idx) {
  require(sys.horizon() >= 1, "linear system: at least one round required");
  require(static_cast<int>(sys.q.size()) == sys.horizon() + idx.p,
          "linear system: need horizon + p cost weights");
  for (double qt : sys.q) require(qt > 0, "linear system: cost weights must be positive");
  for (const Vec& wt : sys.w)
    require(wt.size() == sys.n(), "linear system: disturbance dimension mismatch");
  require(sys.x0.size() == sys.n() && sys.x0.norm() == 0,
          "linear system: the reduction assumes x0 = 0");
}

}  // namespace

// --------------------------- Canonical structure ----------------------------

Vec CanonicalIndices::select(const Vec& x) const {
  Vec out(d);
  for (int i = 0; i < d; ++i) out[i] = x[k[i] - 1];
  return out;
}

CanonicalIndices canonical_indices(const Mat& A, const Mat& B) {
  const int n = static_cast<int>(A.rows());
  require(A.cols() == n && n >= 1, "canonical_indices: A must be square");
  require(B.rows() == n && B.cols() >= 1, "canonical_indices: B must be n×d");
  const int d = static_cast<int>(B.cols());

  CanonicalIndices idx;
  idx.n = n;
  idx.d = d;

  // Non-zero rows of B must be unit rows hitting the inputs in order.
  std::vector<int> rows;
  for (int r = 1; r <= n; ++r) {
    if (B.row(r - 1).cwiseAbs().maxCoeff() == 0.0) continue;
    const int col = static_cast<int>(rows.size());
    std::ostringstream msg;
    msg << "canonical_indices: row " << r << " of B is not the expected unit row";
    require(col < d, msg.str());
    for (int c = 0; c < d; ++c)
      require(B(r - 1, c) == (c == col ? 1.0 : 0.0), msg.str());
    rows.push_back(r);
  }
  require(static_cast<int>(rows.size()) == d, "canonical_indices: B must have d unit rows");
  require(rows.back() == n, "canonical_indices: the last input row must be row n");
  idx.k = rows;

  for (int r = 1; r <= n; ++r) {
    bool input_row = false;
    for (int ki : idx.k) input_row |= (ki == r);
    if (input_row) continue;
    std::ostringstream msg;
    msg << "canonical_indices: row " << r << " of A is not a shift row";
    for (int c = 1; c <= n; ++c)
      require(A(r - 1, c - 1) == (c == r + 1 ? 1.0 : 0.0), msg.str());
  }

  int prev = 0;
  for (int i = 0; i < d; ++i) {
    idx.p_i.push_back(idx.k[i] - prev);
    prev = idx.k[i];
  }
  idx.p = *std::max_element(idx.p_i.begin(), idx.p_i.end());
  return idx;
}

std::vector<Mat> extract_memory_maps(const Mat& A, const CanonicalIndices& idx) {
  std::vector<Mat> maps(idx.p, Mat::Zero(idx.d, idx.d));
  for (int i = 1; i <= idx.p; ++i)
    for (int h = 1; h <= idx.d; ++h)
      for (int j = 1; j <= idx.d; ++j)
        if (i <= idx.p_i[j - 1]) maps[i - 1](h - 1, j - 1) = A(idx.k[h - 1] - 1, idx.k[j - 1] - i);
  return maps;
}

double accumulated_disturbance(const std::vector<Vec>& w, const CanonicalIndices& idx, int t,
                               int i, int j) {
  require(i >= 1 && i <= idx.d, "accumulated_disturbance: coordinate block out of range");
  require(j >= 1 && j <= idx.p_i[i - 1], "accumulated_disturbance: offset out of range");
  if (j == 1) return 0.0;
  require(t - 1 < static_cast<int>(w.size()) && t + 1 - j >= 0,
          "accumulated_disturbance: requested history out of range");
  return r_extended(w, idx, t, i, j);
}

// --------------------------- Linear reduction -------------------------------

std::vector<Vec> LinearReduction::y_from_u(const std::vector<Vec>& u) const {
  std::vector<Vec> y;
  y.reserve(u.size());
  for (size_t t = 0; t < u.size(); ++t) {
    Vec yt = u[t];
    for (int i = 1; i <= idx.p; ++i)
      if (static_cast<int>(t) - i >= 0) yt += maps[i - 1] * y[t - i];
    y.push_back(std::move(yt));
  }
  return y;
}

std::vector<Vec> LinearReduction::u_from_y(const std::vector<Vec>& y) const {
  std::vector<Vec> u;
  u.reserve(y.size());
  for (size_t t = 0; t < y.size(); ++t) {
    Vec ut = y[t];
    for (int i = 1; i <= idx.p; ++i)
      if (static_cast<int>(t) - i >= 0) ut -= maps[i - 1] * y[t - i];
    u.push_back(std::move(ut));
  }
  return u;
}

double LinearReduction::offset_total() const {
  double s = 0;
  for (double o : hitting_offsets) s += o;
  return s;
}

LinearReduction reduce_linear(const LinearControlSystem& sys) {
  LinearReduction red;
  red.idx = canonical_indices(sys.A, sys.B);
  validate_linear_inputs(sys, red.idx);
  red.maps = extract_memory_maps(sys.A, red.idx);

  const int T = sys.horizon();
  const std::vector<Vec> wpad = padded_disturbances(sys, red.idx.p);
  red.zeta = zeta_sequence(sys, red.idx, red.maps, wpad);
  red.hitting_offsets.assign(T, 0.0);

  Instance inst;
  inst.T = T;
  inst.d = red.idx.d;
  inst.k = red.idx.p;
  inst.switching = SwitchingCost::linear(red.maps);
  inst.prehistory.assign(red.idx.p, Vec::Zero(red.idx.d));
  for (int t = 0; t < T; ++t) {
    HittingCost cost;
    cost.geometry = round_geometry(red.idx, sys.q, t);
    cost.minimizer = round_target(red.idx, sys.q, wpad, red.zeta[t], t, &red.hitting_offsets[t]);
    inst.costs.push_back(std::move(cost));
  }
  inst.finalize();
  red.instance = std::move(inst);
  return red;
}

double control_cost(const LinearControlSystem& sys, const std::vector<Vec>& u) {
  CanonicalIndices idx = canonical_indices(sys.A, sys.B);
  validate_linear_inputs(sys, idx);
  const int T = sys.horizon();
  require(static_cast<int>(u.size()) == T, "control_cost: one action per round required");
  std::vector<Vec> x = simulate(sys, u, idx.p);
  double cost = 0;
  for (int t = 0; t < T; ++t) {
    cost += 0.5 * u[t].squaredNorm();
    for (int i = 1; i <= idx.d; ++i)
      for (int j = 1; j <= idx.p_i[i - 1]; ++j) {
        const double cell = x[t + j][idx.k[i - 1] - j];  // coordinate k_i+1−j, 0-based
        cost += 0.5 * sys.q.at(t + j) * cell * cell;
      }
  }
  return cost;
}

// --------------------------- Nonlinear reduction ----------------------------

NonlinearReduction reduce_nonlinear(const NonlinearControlSystem& sys) {
  const int n = sys.n();
  const int T = sys.horizon();
  require(T >= 1, "nonlinear system: at least one round required");
  require(static_cast<int>(sys.Q.size()) == T, "nonlinear system: one Q per round required");
  require(sys.delay >= 0 && sys.delay <= T, "nonlinear system: bad delay");
  require(sys.x0.size() == n, "nonlinear system: bad initial state");
  require(sys.lipschitz > 0, "nonlinear system: declared Lipschitz constant required");

  Mat A = sys.A;
  auto g = sys.g;
  auto gj = sys.g_jacobian;
  SwitchingCost sw = SwitchingCost::callback(
      n, 1, [A, g](const std::vector<Vec>& mem) { return Vec(A * mem[0] + g(mem[0])); },
      {sys.lipschitz},
      gj ? SwitchingCost::JacobianFn([A, gj](const std::vector<Vec>& mem, int) {
        return Mat(A + gj(mem[0]));
      })
         : SwitchingCost::JacobianFn());

  Instance inst;
  inst.T = T;
  inst.d = n;
  inst.k = sys.delay;
  inst.switching = std::move(sw);
  inst.prehistory = {sys.x0};
  for (int t = 1; t <= T; ++t) {
    HittingCost cost;
    cost.geometry = Quadratic::dense(sys.Q[t - 1]);
    cost.minimizer = sys.targets[t - 1];
    inst.costs.push_back(std::move(cost));
  }
  inst.finalize();

  NonlinearReduction red;
  red.instance = std::move(inst);
  return red;
}

std::vector<Vec> NonlinearReduction::y_from_u(const NonlinearControlSystem& sys,
                                              const std::vector<Vec>& u) const {
  std::vector<Vec> y;
  Vec x = sys.x0;
  for (const Vec& ut : u) {
    x = sys.A * x + ut + sys.g(x);
    y.push_back(x);
  }
  return y;
}

std::vector<Vec> NonlinearReduction::u_from_y(const NonlinearControlSystem& sys,
                                              const std::vector<Vec>& y) const {
  std::vector<Vec> u;
  Vec prev = sys.x0;
  for (const Vec& yt : y) {
    u.push_back(yt - sys.A * prev - sys.g(prev));
    prev = yt;
  }
  return u;
}

double control_cost(const NonlinearControlSystem& sys, const std::vector<Vec>& u) {
  const int T = sys.horizon();
  require(static_cast<int>(u.size()) == T, "control_cost: one action per round required");
  double cost = 0;
  Vec x = sys.x0;
  for (int t = 1; t <= T; ++t) {
    cost += 0.5 * u[t - 1].squaredNorm();
    x = sys.A * x + u[t - 1] + sys.g(x);
    Vec e = x - sys.targets[t - 1];
    cost += 0.5 * e.dot(sys.Q[t - 1] * e);
  }
  return cost;
}

// --------------------------- Round-trip verification ------------------------

EquivalenceReport roundtrip_verify(const LinearControlSystem& sys, const std::vector<Vec>& u,
                                   double tol) {
  LinearReduction red = reduce_linear(sys);
  const int T = sys.horizon();
  std::vector<Vec> y = red.y_from_u(u);
  Trajectory traj;
  traj.points = y;
  CostReport oco = evaluate_total(red.instance, traj);

  EquivalenceReport rep;
  rep.control_cost = control_cost(sys, u);
  rep.oco_cost = oco.total + red.offset_total();
  rep.abs_diff = std::abs(rep.control_cost - rep.oco_cost);
  rep.rel_diff = rep.abs_diff / std::max(1e-300, std::abs(rep.control_cost));

  std::vector<Vec> x = simulate(sys, u, red.idx.p);
  const std::vector<Vec> wpad = padded_disturbances(sys, red.idx.p);
  for (int t = 0; t < T; ++t) {
    rep.state_identity_err =
        std::max(rep.state_identity_err,
                 (red.idx.select(x[t + 1]) - (y[t] + red.zeta[t])).norm());
  }
  for (int t = 0; t < T; ++t)
    for (int i = 1; i <= red.idx.d; ++i)
      for (int j = 1; j <= red.idx.p_i[i - 1]; ++j) {
        const double cell = x[t + j][red.idx.k[i - 1] - j];
        const double decomposed =
            red.idx.select(x[t + 1])[i - 1] + r_extended(wpad, red.idx, t + j, i, j);
        rep.decomposition_err = std::max(rep.decomposition_err, std::abs(cell - decomposed));
      }

  if (rep.rel_diff > tol) {
    // Locate the first per-round mismatch for the report.
    for (int t = 0; t < T && rep.first_bad_step < 0; ++t) {
      double ctrl_step = 0.5 * u[t].squaredNorm();
      for (int i = 1; i <= red.idx.d; ++i)
        for (int j = 1; j <= red.idx.p_i[i - 1]; ++j) {
          const double cell = x[t + j][red.idx.k[i - 1] - j];
          ctrl_step += 0.5 * sys.q.at(t + j) * cell * cell;
        }
      const double oco_step = oco.hitting[t] + oco.switching[t] + red.hitting_offsets[t];
      if (std::abs(ctrl_step - oco_step) > tol * std::max(1.0, std::abs(ctrl_step)))
        rep.first_bad_step = t;
    }
    throw VerificationFailure("roundtrip_verify: cost mismatch at step " +
                              std::to_string(rep.first_bad_step));
  }
  rep.ok = rep.state_identity_err <= 1e-8 && rep.decomposition_err <= 1e-8;
  return rep;
}

EquivalenceReport roundtrip_verify(const NonlinearControlSystem& sys, const std::vector<Vec>& u,
                                   double tol) {
  NonlinearReduction red = reduce_nonlinear(sys);
  std::vector<Vec> y = red.y_from_u(sys, u);
  Trajectory traj;
  traj.points = y;
  CostReport oco = evaluate_total(red.instance, traj);

  EquivalenceReport rep;
  rep.control_cost = control_cost(sys, u);
  rep.oco_cost = oco.total;
  rep.abs_diff = std::abs(rep.control_cost - rep.oco_cost);
  rep.rel_diff = rep.abs_diff / std::max(1e-300, std::abs(rep.control_cost));
  if (rep.rel_diff > tol)
    throw VerificationFailure("roundtrip_verify: nonlinear cost mismatch");
  rep.ok = true;
  return rep;
}

// --------------------------- Online drivers ---------------------------------

ControlRun run_linear_control(const LinearControlSystem& sys, double lambda,
                              const SolverConfig& cfg) {
  CanonicalIndices idx = canonical_indices(sys.A, sys.B);
  validate_linear_inputs(sys, idx);
  std::vector<Mat> maps = extract_memory_maps(sys.A, idx);
  const int T = sys.horizon();

  IrobdOnline online(SwitchingCost::linear(maps), std::vector<Vec>(idx.p, Vec::Zero(idx.d)),
                     idx.p, lambda, cfg);

  ControlRun run;
  run.states.push_back(sys.x0);
  std::vector<Vec> w_seen;  // recovered disturbances, one round behind
  std::vector<Vec> zeta;    // ζ_0..ζ_{t−1}, built as disturbances surface

  for (int t = 0; t < T; ++t) {
    if (t > 0) {
      // The new state pins down the previous disturbance, which in turn
      // completes ζ_{t−1}: everything it needs has now been seen.
      w_seen.push_back(run.states[t] - sys.A * run.states[t - 1] - sys.B * run.actions[t - 1]);
      Vec z = idx.select(w_seen[t - 1]);
      for (int i = 1; i <= idx.p; ++i) {
        Vec prev = (t - 1 - i >= 0) ? zeta[t - 1 - i] : Vec(Vec::Zero(idx.d));
        z += maps[i - 1] * (prev + rho(w_seen, idx, t - 1, i));
      }
      zeta.push_back(std::move(z));
    }

    std::optional<Vec> reveal;
    if (t >= idx.p) {
      const int s = t - idx.p;  // rounds behind: every ingredient is observed
      reveal = round_target(idx, sys.q, w_seen, zeta[s], s, nullptr);
    }
    Vec y = online.step(round_geometry(idx, sys.q, t), reveal);
    Vec u = y;
    for (int i = 1; i <= idx.p; ++i)
      if (t - i >= 0) u -= maps[i - 1] * run.decisions[t - i];
    run.decisions.push_back(std::move(y));
    run.actions.push_back(u);
    run.states.push_back(sys.A * run.states[t] + sys.B * run.actions[t] + sys.w[t]);
  }
  run.cost = control_cost(sys, run.actions);
  return run;
}

ControlRun run_nonlinear_control(const NonlinearControlSystem& sys, double lambda,
                                 const SolverConfig& cfg) {
  NonlinearReduction red = reduce_nonlinear(sys);
  const Instance& inst = red.instance;
  IrobdOnline online(inst.switching, inst.prehistory, inst.k, lambda, cfg);

  ControlRun run;
  run.states.push_back(sys.x0);
  for (int t = 1; t <= inst.T; ++t) {
    std::optional<Vec> reveal;
    if (t > inst.k) reveal = inst.cost(t - inst.k).minimizer;
    Vec y = online.step(inst.cost(t).geometry, reveal);
    const Vec& prev = run.states[t - 1];
    run.actions.push_back(y - sys.A * prev - sys.g(prev));
    run.states.push_back(y);
    run.decisions.push_back(std::move(y));
  }
  run.cost = control_cost(sys, run.actions);
  return run;
}

}  // namespace irobd
