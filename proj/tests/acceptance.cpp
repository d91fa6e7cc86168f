// Acceptance suite: one case per criterion, each printing a pass/fail line
// with its headline measurement and runtime.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>

#include "irobd/algorithms.hpp"
#include "irobd/bounds.hpp"
#include "irobd/cli_ops.hpp"
#include "irobd/core.hpp"
#include "irobd/instances.hpp"
#include "irobd/json_io.hpp"
#include "irobd/offline.hpp"
#include "irobd/reductions.hpp"
#include "irobd/rng.hpp"
#include "irobd/verify.hpp"

using namespace irobd;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, bool ok, const std::string& what, double secs) {
  std::printf("[%s] criterion %2d — %s (%.2fs)\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
              secs);
  std::fflush(stdout);
}

Vec vec1(double a) {
  Vec v(1);
  v[0] = a;
  return v;
}

Instance soco_delayed(uint64_t seed, int k) {
  RandomSpec spec;
  spec.seed = seed;
  spec.T = 14;
  spec.d = 1 + static_cast<int>(seed % 3);
  spec.p = 1;
  spec.k = k;
  spec.m = 0.5 + 0.1 * static_cast<double>(seed % 8);
  spec.l = spec.m + 0.2 + 0.1 * static_cast<double>(seed % 5);
  Instance inst = gen_random(spec);
  inst.switching = SwitchingCost::linear({Mat::Identity(spec.d, spec.d)});
  inst.finalize();
  return inst;
}

}  // namespace

TEST_CASE("criterion 1: escalation-family ratio identity") {
  Stopwatch watch;
  bool ok = true;
  double worst = 0;
  for (double m : {1.0, 2.0})
    for (double alpha : {1.5, 2.0})
      for (int k : {1, 2, 3, 4}) {
        Instance inst = gen_thm3(m, alpha, k);
        const double stay = evaluate_total(inst, run_stay(inst)).total;
        const double adv = evaluate_total(inst, minimizer_trajectory(inst)).total;
        const double gap = std::abs(stay / adv - ratio_lower_bound_delay(m, alpha, k));
        worst = std::max(worst, gap);
        ok &= gap <= 1e-9;
      }
  const double secs = watch.seconds();
  ok &= secs < 1.0;
  report(1, ok,
         "stay/adversary ratio equals m(α^{2k}−1)/(α²−1), worst gap " + format_double(worst),
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 2: plateau-sine gap") {
  Stopwatch watch;
  bool ok = true;
  const double eps = 0.1;
  const int n = 5;
  for (double gamma : {0.05, 0.02, 0.01}) {
    Remark2Output game = gen_remark2(eps, gamma, n);
    const double budget = 3.0 * gamma * eps * eps;

    const double reference_cost = evaluate_total(game.instance, game.reference).total;
    ok &= std::abs(reference_cost - budget) <= 1e-12;

    GridSpec grid;
    grid.cells = 4001;
    const double dp = offline_objective(game.instance, solve_offline_dp(game.instance, grid));
    ok &= dp <= budget;

    for (const char* alg : {"robd", "irobd"}) {
      Trajectory traj = alg[0] == 'r' ? run_robd(game.instance, 1.0)
                                      : run_irobd(game.instance, 1.0).trajectory;
      // The run must follow the targets through round n (the tracking
      // branch); its cost is then dominated by the forced final step.
      for (int t = 1; t <= n; ++t)
        ok &= (traj.points[t - 1] - game.instance.cost(t).minimizer).norm() <= 1e-7;
      const double total = evaluate_total(game.instance, traj).total;
      ok &= total >= 2.0 * eps * eps - 1e-9;
      ok &= total / dp >= 2.0 / (3.0 * gamma) * 0.99;
    }
  }
  const double secs = watch.seconds();
  ok &= secs < 30.0;
  report(2, ok,
         "reference cost 3γε² exact, table oracle under budget, online runs forced to pay",
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 3: single-step guarantee at the balance point") {
  Stopwatch watch;
  bool ok = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  Rng rng(2026);
  for (int i = 0; i < 100; ++i) {
    const double m = rng.uniform(0.5, 4.0);
    const double L = rng.uniform(0.0, 1.0);
    const bool sine = i % 2 == 1;
    Instance inst = gen_remark1(m, L, 50, 1000 + i, sine);
    OptimizedBound ob = ratio_bound_nonlinear_soco_opt(m, L);
    Trajectory traj = run_robd(inst, ob.lambda);
    const double alg = evaluate_total(inst, traj).total;
    double opt;
    if (sine) {
      GridSpec grid;
      grid.cells = 1201;
      opt = offline_objective(inst, solve_offline_dp(inst, grid));
    } else {
      opt = offline_objective(inst, solve_offline_convex(inst));
    }
    REQUIRE(opt > 0);
    const double ratio = alg / opt;
    worst_margin = std::min(worst_margin, ob.value + 1e-6 - ratio);
    ok &= ratio <= ob.value + 1e-6;
  }
  const double secs = watch.seconds();
  ok &= secs < 120.0;
  report(3, ok,
         "100 balance-point runs within the closed-form guarantee, smallest margin " +
             format_double(worst_margin),
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 4: zero delay degenerates to the no-delay run") {
  Stopwatch watch;
  bool ok = true;
  double worst = 0;
  SolverConfig cfg;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    RandomSpec spec;
    spec.seed = seed;
    spec.T = 12;
    spec.k = 0;
    spec.m = 0.5 + 0.05 * static_cast<double>(seed % 10);
    spec.l = spec.m + 0.8;
    if (seed % 3 == 0) {
      spec.d = 1;
      spec.p = 1;
      spec.delta_kind = RandomSpec::DeltaKind::Drone;
    } else {
      spec.d = 1 + static_cast<int>(seed % 3);
      spec.p = 1 + static_cast<int>(seed % 2);
      spec.alpha = 0.3 + 0.05 * static_cast<double>(seed % 7);
    }
    Instance inst = gen_random(spec);
    Trajectory a = run_robd(inst, 0.7, 0.0, cfg);
    Trajectory b = run_irobd(inst, 0.7, cfg).trajectory;
    for (int t = 0; t < inst.T; ++t)
      worst = std::max(worst, (a.points[t] - b.points[t]).lpNorm<Eigen::Infinity>());
  }
  ok &= worst <= 2.0 * cfg.grad_tol;
  report(4, ok, "50 instances, max per-coordinate gap " + format_double(worst), watch.seconds());
  CHECK(ok);
}

TEST_CASE("criterion 5: distance recursions along the delay sweep") {
  Stopwatch watch;
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  Rng rng(501);
  for (int i = 0; i < 200; ++i) {
    RandomSpec spec;
    spec.seed = rng.next();
    spec.T = 10 + static_cast<int>(rng.next() % 8);
    spec.k = 1 + static_cast<int>(rng.next() % 4);
    spec.m = rng.uniform(0.5, 1.5);
    spec.l = spec.m + rng.uniform(0.0, 1.0);
    const bool linear = i % 4 != 3;
    if (linear) {
      spec.d = 1 + static_cast<int>(rng.next() % 3);
      spec.p = 1 + static_cast<int>(rng.next() % 3);
      spec.alpha = rng.uniform(0.2, 0.9);
    } else {
      spec.d = 1;
      spec.p = 1;
      spec.delta_kind = RandomSpec::DeltaKind::Drone;
      spec.drone_c1 = rng.uniform(0.0, 0.15);
      spec.drone_c2 = rng.uniform(0.0, 0.02);
    }
    Instance inst = gen_random(spec);
    CheckResult general = check_drift_recursion(inst, 0.5, 1e-8);
    ok &= general.pass;
    worst = std::min(worst, general.worst_slack);
    if (linear) {
      CheckResult lin = check_drift_recursion_linear(inst, 0.5, 1e-8);
      ok &= lin.pass;
      worst = std::min(worst, lin.worst_slack);
    }
  }
  report(5, ok, "200 sweeps, every per-step recursion slack >= " + format_double(worst),
         watch.seconds());
  CHECK(ok);
}

TEST_CASE("criterion 6: no-delay tracking bound against the exact solve") {
  Stopwatch watch;
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  Rng rng(601);
  const double lambda = 0.5;
  for (int i = 0; i < 100; ++i) {
    RandomSpec spec;
    spec.seed = rng.next();
    spec.T = 15;
    spec.d = 1 + static_cast<int>(rng.next() % 3);
    spec.p = 1 + static_cast<int>(rng.next() % 3);
    spec.k = 1;
    spec.m = rng.uniform(0.5, 1.5);
    spec.l = spec.m + rng.uniform(0.0, 1.0);
    spec.alpha = 0.8 / spec.p;  // keeps m + (1 − p²L²)λ comfortably positive
    Instance inst = gen_random(spec);
    const double L = inst.switching.max_lipschitz();
    REQUIRE(inst.m + (1.0 - static_cast<double>(spec.p) * spec.p * L * L) * lambda > 0);
    CheckResult res = check_tracking_bound(inst, lambda, solve_offline_convex(inst), 1e-6);
    ok &= res.pass;
    worst = std::min(worst, res.worst_slack);
  }
  report(6, ok, "100 instances, aggregate slack >= " + format_double(worst), watch.seconds());
  CHECK(ok);
}

TEST_CASE("criterion 7: reduction cost equivalence") {
  Stopwatch watch;
  bool ok = true;
  Rng rng(701);
  double worst_rel = 0;
  for (int i = 0; i < 100; ++i) {
    LinearControlSystem sys = gen_random_canonical(rng.next(), 6, 3, 10);
    CanonicalIndices idx = canonical_indices(sys.A, sys.B);
    std::vector<Vec> u(sys.horizon());
    for (Vec& ut : u) ut = rng.normal_vec(idx.d) * 0.6;
    EquivalenceReport rep = roundtrip_verify(sys, u);
    worst_rel = std::max(worst_rel, rep.rel_diff);
    ok &= rep.rel_diff <= 1e-8 && rep.ok;
  }
  for (int i = 0; i < 100; ++i) {
    NonlinearControlSystem sys = gen_random_nonlinear_system(rng.next(), 3, 10);
    std::vector<Vec> u(sys.horizon());
    for (Vec& ut : u) ut = rng.normal_vec(sys.n()) * 0.6;
    EquivalenceReport rep = roundtrip_verify(sys, u);
    worst_rel = std::max(worst_rel, rep.rel_diff);
    ok &= rep.rel_diff <= 1e-8;
  }
  {
    Mat a(2, 2), b(2, 1);
    a << 0, 1, -1, 2;
    b << 0, 1;
    std::vector<Mat> maps = extract_memory_maps(a, canonical_indices(a, b));
    ok &= maps.size() == 2 && maps[0](0, 0) == 2.0 && maps[1](0, 0) == -1.0;
  }
  report(7, ok, "200 plants, worst relative cost gap " + format_double(worst_rel),
         watch.seconds());
  CHECK(ok);
}

TEST_CASE("criterion 8: oracle agreement and dominance") {
  Stopwatch watch;
  bool ok = true;
  Rng rng(801);
  for (int i = 0; i < 8; ++i) {
    RandomSpec spec;
    spec.seed = rng.next();
    spec.T = 6 + i % 3;
    spec.d = 1;
    spec.p = 1;
    spec.k = 0;
    spec.m = rng.uniform(0.6, 1.4);
    spec.l = spec.m;
    spec.alpha = rng.uniform(0.3, 1.0);
    Instance inst = gen_random(spec);
    ok &= check_oracle_agreement(inst, 1e-4).pass;
  }
  for (int i = 0; i < 10; ++i) {
    const bool linear = i % 2 == 0;
    RandomSpec spec;
    spec.seed = rng.next();
    spec.T = 10;
    spec.d = linear ? 1 + static_cast<int>(rng.next() % 3) : 1;
    spec.p = linear ? 1 + static_cast<int>(rng.next() % 2) : 1;
    spec.k = 1;
    spec.m = 0.8;
    spec.l = 1.4;
    spec.alpha = 0.5;
    if (!linear) spec.delta_kind = RandomSpec::DeltaKind::Drone;
    Instance inst = gen_random(spec);
    std::vector<Trajectory> algs = {full_information_robd(inst, 0.7),
                                    run_irobd(inst, 0.7).trajectory, run_stay(inst),
                                    minimizer_trajectory(inst)};
    ok &= check_oracle_dominance(inst, algs, 1e-8).pass;
  }
  report(8, ok, "triple agreement within 1e-4 and oracle dominance within 1e-8",
         watch.seconds());
  CHECK(ok);
}

TEST_CASE("criterion 9: move-to-minimizer step bounds and delay monotonicity") {
  Stopwatch watch;
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    Instance inst = soco_delayed(seed, 1 + static_cast<int>(seed % 5));
    CheckResult res = check_m2m_step_bounds(inst, solve_offline_convex(inst), 1e-6);
    ok &= res.pass;
    worst = std::min(worst, res.worst_slack);
  }

  // The delayed-run guarantees carry unspecified constants, so the measured
  // ratio is only asserted to grow with the delay on the escalation family;
  // shape values are reported through the sweep instead of pass/fail gates.
  double prev = 0;
  for (int k = 1; k <= 4; ++k) {
    Instance inst = gen_thm3(1.0, 2.0, k);
    const double alg = evaluate_total(inst, run_irobd(inst, 1.0).trajectory).total;
    const double opt = offline_objective(inst, solve_offline_convex(inst));
    const double ratio = alg / opt;
    ok &= ratio >= prev - 1e-12;
    prev = ratio;
  }

  const std::string csv = cmd_sweep(R"({
    "families": [{"family": "random", "T": 10, "d": [1], "p": [1], "k": [1, 2, 3],
                   "alpha": [0.5], "m": 1.0, "l": 1.5}],
    "algorithms": ["irobd"],
    "lambdas": [0.5],
    "seeds": [1, 2]
  })");
  ok &= csv.find("linear-delay-shape") != std::string::npos;
  ok &= csv.find(",shape") != std::string::npos;

  report(9, ok,
         "50 instances of per-step bounds (slack >= " + format_double(worst) +
             "), ratio grows with delay, shape curves reported",
         watch.seconds());
  CHECK(ok);
}

TEST_CASE("criterion 10: solver cross-checks") {
  Stopwatch watch;
  bool ok = true;
  Rng rng(1001);
  SolverConfig closed;
  SolverConfig iterative;
  iterative.method = SolverConfig::Method::Iterative;
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = rng.uniform_int(1, 5);
    Vec eig(d);
    for (int i = 0; i < d; ++i) eig[i] = rng.uniform(0.3, 3.0);
    Mat g(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) g(r, c) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(g);
    Mat u = qr.householderQ();
    Quadratic h = Quadratic::dense(u * eig.asDiagonal() * u.transpose());
    SwitchingCost sw = SwitchingCost::linear({Mat(rng.uniform(0.2, 1.2) * Mat::Identity(d, d))});
    std::vector<Vec> mem = {rng.normal_vec(d)};
    Vec v = rng.normal_vec(d);
    const double l1 = rng.uniform(0.05, 2.0), l2 = rng.uniform(0.0, 0.5);
    Vec a = robd_minimize(h, v, sw, mem, l1, l2, closed);
    Vec b = robd_minimize(h, v, sw, mem, l1, l2, iterative);
    worst = std::max(worst, (a - b).norm());
  }
  ok &= worst <= 1e-7;

  // The optimistic estimate must be the memory-map point for every map kind.
  std::vector<SwitchingCost> kinds;
  kinds.push_back(SwitchingCost::linear(
      {Mat(0.8 * Mat::Identity(2, 2)), Mat(-0.3 * Mat::Identity(2, 2))}));
  kinds.push_back(SwitchingCost::affine_drone(0.1, 0.01, 6.0));
  kinds.push_back(SwitchingCost::plateau_sine(0.1, 0.05, 4, 2.0));
  kinds.push_back(SwitchingCost::callback(
      1, 1, [](const std::vector<Vec>& mem) { return Vec(vec1(std::tanh(mem[0][0]))); }, {1.0}));
  for (const SwitchingCost& sw : kinds) {
    std::vector<Vec> mem;
    for (int i = 0; i < sw.memory(); ++i) mem.push_back(rng.normal_vec(sw.dim()));
    Vec est = estimate_minimizer(Quadratic::isotropic(sw.dim(), 1.1), sw, mem, 0.9, closed);
    ok &= (est - sw.delta(mem)).norm() <= closed.grad_tol;
  }
  report(10, ok,
         "1000 closed-vs-iterative solves, worst gap " + format_double(worst) +
             "; estimates equal the map point for every kind",
         watch.seconds());
  CHECK(ok);
}
