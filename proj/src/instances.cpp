#include "irobd/instances.hpp"

#include <cmath>
#include <limits>

#include "irobd/core.hpp"
#include "irobd/rng.hpp"

namespace irobd {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Vec scalar(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

HittingCost iso_cost(int d, double m, Vec v) {
  HittingCost c;
  c.geometry = Quadratic::isotropic(d, m);
  c.minimizer = std::move(v);
  return c;
}

/// Random orthogonal matrix via QR of a Gaussian draw.
Mat random_orthogonal(int d, Rng& rng) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  return q;
}

}  // namespace

Instance gen_thm3(double m, double alpha, int k) {
  require(m > 0, "gen_thm3: m must be positive");
  require(alpha > 1, "gen_thm3: alpha must exceed 1");
  require(k >= 1, "gen_thm3: delay must be >= 1");
  Instance inst;
  inst.T = k;
  inst.d = 1;
  inst.k = k;
  Mat c(1, 1);
  c(0, 0) = alpha;
  inst.switching = SwitchingCost::linear({c});
  inst.prehistory = {scalar(0.0)};
  double v = 1.0;
  for (int t = 1; t <= k; ++t) {
    inst.costs.push_back(iso_cost(1, m, scalar(v)));
    v *= alpha;
  }
  inst.finalize();
  return inst;
}

Instance gen_remark1(double m, double L, int T, uint64_t seed, bool sine_deviation) {
  require(m > 0, "gen_remark1: m must be positive");
  require(L >= 0, "gen_remark1: L must be non-negative");
  require(T >= 1, "gen_remark1: horizon must be positive");
  Instance inst;
  inst.T = T;
  inst.d = 1;
  inst.k = 0;
  if (!sine_deviation) {
    Mat c(1, 1);
    c(0, 0) = 1.0 + L;
    inst.switching = SwitchingCost::linear({c});
  } else {
    // δ(y) = y + L·sin(y): a genuinely nonlinear deviation whose Lipschitz
    // constant is exactly L; the total map's slot constant is 1 + L.
    inst.switching = SwitchingCost::callback(
        1, 1,
        [L](const std::vector<Vec>& mem) { return Vec(scalar(mem[0][0] + L * std::sin(mem[0][0]))); },
        {1.0 + L},
        [L](const std::vector<Vec>& mem, int) {
          Mat j(1, 1);
          j(0, 0) = 1.0 + L * std::cos(mem[0][0]);
          return j;
        });
  }
  inst.prehistory = {scalar(0.0)};
  // Seeded targets: a random walk with occasional geometric escalation, so
  // sweeps exercise both drift and bursts.
  Rng rng(seed);
  double v = 0.0;
  for (int t = 1; t <= T; ++t) {
    if (rng.uniform() < 0.2) {
      v *= rng.uniform(1.05, 1.25);
      v += rng.uniform(-0.1, 0.1);
    } else {
      v += rng.normal() * 0.4;
    }
    v = std::clamp(v, -6.0, 6.0);
    inst.costs.push_back(iso_cost(1, m, scalar(v)));
  }
  inst.finalize();
  return inst;
}

double plateau_sine_base(double eps, double gamma, int n, double y) {
  const double a = n * eps;
  const double b = a + gamma * eps;
  if (y <= a) return eps;
  if (y <= b) return -eps * std::sin(kPi / (gamma * eps) * y - n * kPi / gamma - kPi / 2.0);
  return -eps;
}

Remark2Output gen_remark2(double eps, double gamma, int n) {
  require(eps > 0, "gen_remark2: eps must be positive");
  require(gamma > 0 && gamma < 1, "gen_remark2: gamma must lie in (0,1)");
  require(n >= 1, "gen_remark2: n must be positive");

  Remark2Output out;
  // Coordinate scale σ = √(2/γ): prices the reference path at exactly 3γε²
  // and the forced follower step at 2ε²/γ while keeping unit curvature.
  const double sigma = std::sqrt(2.0 / gamma);
  out.scale = sigma;

  Instance inst;
  inst.T = n + 1;
  inst.d = 1;
  inst.k = 0;
  inst.switching = SwitchingCost::plateau_sine(eps, gamma, n, sigma);
  inst.prehistory = {scalar(0.0)};
  for (int t = 1; t <= n; ++t) inst.costs.push_back(iso_cost(1, 1.0, scalar(sigma * t * eps)));
  inst.costs.push_back(iso_cost(1, 1.0, scalar(sigma * (n - 1) * eps)));
  inst.finalize();
  out.instance = std::move(inst);

  out.reference.label = "early-departure";
  for (int t = 1; t <= n - 1; ++t) out.reference.points.push_back(scalar(sigma * t * eps));
  out.reference.points.push_back(scalar(sigma * (n * eps + gamma * eps)));
  out.reference.points.push_back(scalar(sigma * (n - 1) * eps));
  return out;
}

Instance gen_drone(double c1, double c2, int T, int k, DroneProfile profile, uint64_t seed) {
  require(c1 >= 0 && c2 >= 0, "gen_drone: coefficients must be non-negative");
  require(T >= 1 && k >= 0 && k <= T, "gen_drone: bad horizon or delay");
  Instance inst;
  inst.T = T;
  inst.d = 1;
  inst.k = k;
  inst.prehistory = {scalar(0.0)};
  Rng rng(seed);
  double v = 0.0;
  for (int t = 1; t <= T; ++t) {
    switch (profile) {
      case DroneProfile::Hover: v = 0.0; break;
      case DroneProfile::Cruise: v = 1.0; break;
      case DroneProfile::Walk: v = std::clamp(v + 0.3 * rng.normal(), -3.0, 3.0); break;
    }
    inst.costs.push_back(iso_cost(1, 1.0, scalar(v)));
  }
  // Operating box for the declared slot constant: generous envelope of the
  // targets plus the gravity offset.
  double reach = 1.0 + c1;
  for (const HittingCost& c : inst.costs) reach = std::max(reach, std::abs(c.minimizer[0]) + 1.0);
  inst.switching = SwitchingCost::affine_drone(c1, c2, 2.0 * reach);
  inst.finalize();
  return inst;
}

Instance gen_random(const RandomSpec& spec) {
  require(spec.m > 0 && spec.l >= spec.m, "gen_random: need 0 < m <= l");
  require(spec.T >= 1 && spec.d >= 1 && spec.p >= 1, "gen_random: bad sizes");
  require(spec.k >= 0 && spec.k <= spec.T, "gen_random: bad delay");
  require(spec.alpha >= 0, "gen_random: alpha must be non-negative");
  Rng rng(spec.seed);

  Instance inst;
  inst.T = spec.T;
  inst.d = spec.d;
  inst.k = spec.k;

  if (spec.delta_kind == RandomSpec::DeltaKind::Linear) {
    std::vector<Mat> maps(spec.p);
    double norm_sum = 0;
    for (int i = 0; i < spec.p; ++i) {
      Mat c(spec.d, spec.d);
      for (int r = 0; r < spec.d; ++r)
        for (int cc = 0; cc < spec.d; ++cc) c(r, cc) = rng.normal();
      maps[i] = c;
      Eigen::JacobiSVD<Mat> svd(c);
      norm_sum += svd.singularValues()(0);
    }
    if (spec.alpha > 0 && norm_sum > 0)
      for (Mat& c : maps) c *= spec.alpha / norm_sum;
    else if (spec.alpha == 0)
      for (Mat& c : maps) c.setZero();
    inst.switching = SwitchingCost::linear(maps);
  } else {
    require(spec.d == 1 && spec.p == 1, "gen_random: drone deltas are 1-D single-step");
    inst.switching = SwitchingCost::affine_drone(spec.drone_c1, spec.drone_c2, 8.0);
  }

  inst.prehistory.assign(spec.p, Vec::Zero(spec.d));

  Vec v = Vec::Zero(spec.d);
  for (int t = 1; t <= spec.T; ++t) {
    v += rng.normal_vec(spec.d) * 0.5;
    for (int c = 0; c < spec.d; ++c) v[c] = std::clamp(v[c], -5.0, 5.0);
    HittingCost cost;
    if (spec.l == spec.m) {
      cost.geometry = Quadratic::isotropic(spec.d, spec.m);
    } else if (spec.d == 1) {
      cost.geometry = Quadratic::isotropic(1, rng.uniform(spec.m, spec.l));
    } else {
      Mat u = random_orthogonal(spec.d, rng);
      Vec eig(spec.d);
      eig[0] = spec.m;  // pin the envelope so the declared (m, l) are tight
      if (spec.d > 1) eig[spec.d - 1] = spec.l;
      for (int i = 1; i + 1 < spec.d; ++i) eig[i] = rng.uniform(spec.m, spec.l);
      cost.geometry = Quadratic::dense(u * eig.asDiagonal() * u.transpose());
    }
    cost.minimizer = v;
    inst.costs.push_back(std::move(cost));
  }
  inst.finalize();
  return inst;
}

PlateauGame play_plateau_game(const Remark2Output& game,
                              const std::function<Trajectory(const Instance&)>& algorithm,
                              double track_tol) {
  const Instance& inst = game.instance;
  Trajectory traj = algorithm(inst);
  CostReport report = evaluate_total(inst, traj);
  PlateauGame out;
  const int n = inst.T - 1;
  for (int t = 1; t <= n; ++t) {
    if ((traj.points[t - 1] - inst.cost(t).minimizer).norm() > track_tol) {
      out.deviated = true;
      out.stop_round = t;
      break;
    }
  }
  if (out.deviated) {
    // Tracking is free through the stopping round, so the adversary's cost
    // is zero and any deviation cost makes the ratio unbounded.
    for (int t = 1; t <= out.stop_round; ++t)
      out.algorithm_cost += report.hitting[t - 1] + report.switching[t - 1];
    out.adversary_cost = 0.0;
    out.ratio = out.algorithm_cost > 0 ? std::numeric_limits<double>::infinity() : 1.0;
  } else {
    out.algorithm_cost = report.total;
    out.adversary_cost = evaluate_total(inst, game.reference).total;
    out.ratio = out.algorithm_cost / out.adversary_cost;
  }
  return out;
}

}  // namespace irobd
