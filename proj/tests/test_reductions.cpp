#include <doctest.h>

#include "irobd/algorithms.hpp"
#include "irobd/core.hpp"
#include "irobd/instances.hpp"
#include "irobd/reductions.hpp"
#include "irobd/rng.hpp"
#include "irobd/verify.hpp"

using namespace irobd;

namespace {

Vec vec1(double a) {
  Vec v(1);
  v[0] = a;
  return v;
}

/// The 2-d worked system: one input, block length two.
LinearControlSystem worked_system(int T, bool with_noise, uint64_t seed) {
  LinearControlSystem sys;
  sys.A = Mat(2, 2);
  sys.A << 0, 1, -1, 2;
  sys.B = Mat(2, 1);
  sys.B << 0, 1;
  Rng rng(seed);
  for (int t = 0; t < T; ++t)
    sys.w.push_back(with_noise ? Vec(rng.normal_vec(2) * 0.4) : Vec(Vec::Zero(2)));
  sys.q.assign(T + 2, 1.0);
  sys.x0 = Vec::Zero(2);
  return sys;
}

}  // namespace

TEST_CASE("canonical structure detection") {
  LinearControlSystem sys = worked_system(5, false, 1);
  CanonicalIndices idx = canonical_indices(sys.A, sys.B);
  CHECK(idx.k == std::vector<int>{2});
  CHECK(idx.p_i == std::vector<int>{2});
  CHECK(idx.p == 2);

  Mat a = Mat::Zero(1, 1);
  Mat b = Mat::Ones(1, 1);
  CanonicalIndices scalar = canonical_indices(a, b);
  CHECK(scalar.k == std::vector<int>{1});
  CHECK(scalar.p == 1);

  // Two inputs at rows 1 and 3: block lengths 1 and 2.
  Mat a3 = Mat::Zero(3, 3);
  a3.row(0) << 0.3, -0.2, 0.5;
  a3(1, 2) = 1.0;  // shift row
  a3.row(2) << 0.1, 0.7, -0.4;
  Mat b3 = Mat::Zero(3, 2);
  b3(0, 0) = 1.0;
  b3(2, 1) = 1.0;
  CanonicalIndices idx3 = canonical_indices(a3, b3);
  CHECK(idx3.k == std::vector<int>{1, 3});
  CHECK(idx3.p_i == std::vector<int>{1, 2});
  CHECK(idx3.p == 2);

  std::vector<Mat> maps3 = extract_memory_maps(a3, idx3);
  CHECK(maps3[0](0, 0) == a3(0, 0));
  CHECK(maps3[0](0, 1) == a3(0, 2));
  CHECK(maps3[0](1, 1) == a3(2, 2));
  CHECK(maps3[1](0, 0) == 0.0);  // first block is too short for a second tap
  CHECK(maps3[1](1, 0) == 0.0);
  CHECK(maps3[1](0, 1) == a3(0, 1));
  CHECK(maps3[1](1, 1) == a3(2, 1));

  // Violations: a non-unit input row, then a broken shift row.
  Mat bad_b = b3;
  bad_b(0, 0) = 2.0;
  CHECK_THROWS_WITH_AS(canonical_indices(a3, bad_b), doctest::Contains("row 1"),
                       std::invalid_argument);
  Mat bad_a = a3;
  bad_a(1, 2) = 0.5;
  CHECK_THROWS_WITH_AS(canonical_indices(bad_a, b3), doctest::Contains("row 2"),
                       std::invalid_argument);
  Mat short_b = Mat::Zero(3, 1);
  short_b(1, 0) = 1.0;  // last input row must be row n
  CHECK_THROWS_AS(canonical_indices(a3, short_b), std::invalid_argument);
}

TEST_CASE("memory maps of the worked system") {
  LinearControlSystem sys = worked_system(5, false, 1);
  CanonicalIndices idx = canonical_indices(sys.A, sys.B);
  std::vector<Mat> maps = extract_memory_maps(sys.A, idx);
  REQUIRE(maps.size() == 2);
  CHECK(maps[0](0, 0) == 2.0);
  CHECK(maps[1](0, 0) == -1.0);

  Mat a = Mat(1, 1);
  a << 0.7;
  CanonicalIndices scalar = canonical_indices(a, Mat::Ones(1, 1));
  CHECK(extract_memory_maps(a, scalar)[0](0, 0) == 0.7);
}

TEST_CASE("accumulated disturbances") {
  LinearControlSystem sys = worked_system(6, true, 3);
  CanonicalIndices idx = canonical_indices(sys.A, sys.B);
  CHECK(accumulated_disturbance(sys.w, idx, 4, 1, 1) == 0.0);
  CHECK(accumulated_disturbance(sys.w, idx, 4, 1, 2) == sys.w[3][0]);

  LinearControlSystem calm = worked_system(6, false, 3);
  CHECK(accumulated_disturbance(calm.w, idx, 5, 1, 2) == 0.0);

  CHECK_THROWS_AS(accumulated_disturbance(sys.w, idx, 7, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(accumulated_disturbance(sys.w, idx, 4, 1, 3), std::invalid_argument);
}

TEST_CASE("reduction of the worked system without noise") {
  LinearControlSystem sys = worked_system(8, false, 1);
  LinearReduction red = reduce_linear(sys);
  CHECK(red.instance.T == 8);
  CHECK(red.instance.d == 1);
  CHECK(red.instance.k == 2);
  for (int t = 1; t <= 8; ++t) {
    CHECK(red.instance.cost(t).geometry.min_curvature() == doctest::Approx(2.0));
    CHECK(red.instance.cost(t).minimizer.norm() == 0.0);  // no noise, no shift
  }
  CHECK(red.offset_total() == 0.0);
  for (const Vec& z : red.zeta) CHECK(z.norm() == 0.0);
}

TEST_CASE("cost equivalence, state identity and register decomposition") {
  Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    LinearControlSystem sys = gen_random_canonical(rng.next(), 6, 3, 10);
    CanonicalIndices idx = canonical_indices(sys.A, sys.B);
    std::vector<Vec> u(sys.horizon());
    for (Vec& ut : u) ut = rng.normal_vec(idx.d) * 0.6;
    EquivalenceReport rep = roundtrip_verify(sys, u);
    CHECK(rep.rel_diff <= 1e-8);
    CHECK(rep.state_identity_err <= 1e-8);
    CHECK(rep.decomposition_err <= 1e-8);
    CHECK(rep.ok);
  }
  // The worked system with noise, exercising the cross-term correction in
  // the noise accumulation.
  LinearControlSystem sys = worked_system(30, true, 9);
  std::vector<Vec> u(30);
  for (Vec& ut : u) ut = rng.normal_vec(1) * 0.5;
  EquivalenceReport rep = roundtrip_verify(sys, u);
  CHECK(rep.rel_diff <= 1e-10);
  CHECK(rep.state_identity_err <= 1e-10);
}

TEST_CASE("action recovery inverts the decision recursion") {
  Rng rng(29);
  LinearControlSystem sys = gen_random_canonical(5, 6, 3, 9);
  LinearReduction red = reduce_linear(sys);
  std::vector<Vec> u(sys.horizon());
  for (Vec& ut : u) ut = rng.normal_vec(red.idx.d);
  std::vector<Vec> y = red.y_from_u(u);
  std::vector<Vec> back = red.u_from_y(y);
  for (size_t t = 0; t < u.size(); ++t) CHECK((u[t] - back[t]).norm() <= 1e-12);
}

TEST_CASE("round targets match a numeric minimization of the exact cost") {
  LinearControlSystem sys = worked_system(9, true, 23);
  LinearReduction red = reduce_linear(sys);
  CanonicalIndices idx = red.idx;
  std::vector<Vec> wpad = sys.w;
  wpad.resize(sys.horizon() + idx.p - 1, Vec::Zero(sys.n()));

  for (int t = 0; t < sys.horizon(); ++t) {
    // f_t(y) = ½ Σ_{i,j} q_{t+j} (y_i + ζ_i + r(t+j,i,j))², descended numerically.
    auto grad = [&](const Vec& y) {
      Vec g = Vec::Zero(idx.d);
      for (int i = 1; i <= idx.d; ++i)
        for (int j = 1; j <= idx.p_i[i - 1]; ++j) {
          double r = 0;
          for (int tau = t + j - 1; tau >= t + 1; --tau)
            r += wpad[tau][idx.k[i - 1] - (tau - t) - 1];
          g[i - 1] += sys.q[t + j] * (y[i - 1] + red.zeta[t][i - 1] + r);
        }
      return g;
    };
    Vec y = Vec::Zero(idx.d);
    for (int iter = 0; iter < 4000; ++iter) y -= 0.2 * grad(y);
    CHECK((y - red.instance.cost(t + 1).minimizer).norm() <= 1e-7);
  }
}

TEST_CASE("delayed content of the reduced costs") {
  // f_t is a function of disturbances up to t+p−1 and nothing later.
  LinearControlSystem sys = worked_system(10, true, 31);
  LinearReduction base = reduce_linear(sys);
  const int p = base.idx.p;
  const int t = 4;  // 0-based round under scrutiny

  LinearControlSystem later = sys;
  for (int s = t + p; s < later.horizon(); ++s) later.w[s] += Vec::Ones(2);
  LinearReduction shifted = reduce_linear(later);
  CHECK((shifted.instance.cost(t + 1).minimizer - base.instance.cost(t + 1).minimizer).norm() ==
        0.0);

  LinearControlSystem edge = sys;
  edge.w[t + p - 1] += Vec::Ones(2);
  LinearReduction moved = reduce_linear(edge);
  CHECK((moved.instance.cost(t + 1).minimizer - base.instance.cost(t + 1).minimizer).norm() >
        1e-9);
}

TEST_CASE("reduced curvature envelope matches the weight windows") {
  LinearControlSystem sys = gen_random_canonical(77, 6, 3, 12);
  LinearReduction red = reduce_linear(sys);
  double qmin = std::numeric_limits<double>::infinity(), qmax = 0;
  for (int t = 0; t < sys.horizon(); ++t)
    for (int i = 1; i <= red.idx.d; ++i) {
      double wsum = 0;
      for (int j = 1; j <= red.idx.p_i[i - 1]; ++j) wsum += sys.q[t + j];
      qmin = std::min(qmin, wsum);
      qmax = std::max(qmax, wsum);
    }
  CHECK(red.instance.m == doctest::Approx(qmin).epsilon(1e-12));
  CHECK(red.instance.l == doctest::Approx(qmax).epsilon(1e-12));
}

TEST_CASE("nonlinear reduction: plain dynamics give the unit map") {
  NonlinearControlSystem sys;
  sys.A = Mat::Identity(2, 2);
  sys.g = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  sys.lipschitz = 1.0;
  for (int t = 0; t < 5; ++t) sys.Q.push_back(Mat::Identity(2, 2));
  Rng rng(3);
  Vec v = Vec::Zero(2);
  for (int t = 0; t < 5; ++t) {
    v += rng.normal_vec(2) * 0.3;
    sys.targets.push_back(v);
  }
  sys.delay = 1;
  sys.x0 = Vec::Zero(2);

  NonlinearReduction red = reduce_nonlinear(sys);
  std::vector<Vec> probe = {rng.normal_vec(2)};
  CHECK((red.instance.switching.delta(probe) - probe[0]).norm() == 0.0);
  CHECK(red.instance.k == 1);
}

TEST_CASE("nonlinear reduction: velocity-tracking plant matches the generator") {
  const double c1 = 0.1, c2 = 0.01;
  Instance direct = gen_drone(c1, c2, 10, 2, DroneProfile::Walk, 13);
  NonlinearControlSystem sys;
  sys.A = Mat::Identity(1, 1);
  sys.g = [c1, c2](const Vec& x) {
    Vec out(1);
    out[0] = -(c1 + c2 * std::abs(x[0]) * x[0]);
    return out;
  };
  sys.lipschitz = direct.switching.lipschitz(0);
  for (int t = 1; t <= 10; ++t) {
    sys.Q.push_back(Mat::Identity(1, 1));
    sys.targets.push_back(direct.cost(t).minimizer);
  }
  sys.delay = 2;
  sys.x0 = vec1(0);
  NonlinearReduction red = reduce_nonlinear(sys);

  Rng rng(37);
  Trajectory traj;
  for (int t = 0; t < 10; ++t) traj.points.push_back(rng.normal_vec(1));
  CostReport a = evaluate_total(direct, traj);
  CostReport b = evaluate_total(red.instance, traj);
  CHECK(a.total == doctest::Approx(b.total).epsilon(1e-12));
}

TEST_CASE("nonlinear cost equivalence on random plants") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    NonlinearControlSystem sys = gen_random_nonlinear_system(rng.next(), 3, 9);
    std::vector<Vec> u(sys.horizon());
    for (Vec& ut : u) ut = rng.normal_vec(sys.n()) * 0.5;
    EquivalenceReport rep = roundtrip_verify(sys, u);
    CHECK(rep.rel_diff <= 1e-8);
  }
}

TEST_CASE("driving the plant online reproduces the reduced-instance run") {
  LinearControlSystem sys = gen_random_canonical(55, 6, 2, 10);
  const double lambda = 0.7;
  ControlRun run = run_linear_control(sys, lambda);
  LinearReduction red = reduce_linear(sys);
  IrobdResult direct = run_irobd(red.instance, lambda);
  REQUIRE(run.decisions.size() == direct.trajectory.points.size());
  for (size_t t = 0; t < run.decisions.size(); ++t)
    CHECK((run.decisions[t] - direct.trajectory.points[t]).norm() <= 1e-9);

  Trajectory traj;
  traj.points = run.decisions;
  const double oco = evaluate_total(red.instance, traj).total + red.offset_total();
  CHECK(run.cost == doctest::Approx(oco).epsilon(1e-9));
}

TEST_CASE("driving the nonlinear plant online reproduces the reduced run") {
  NonlinearControlSystem sys = gen_random_nonlinear_system(67, 3, 9);
  const double lambda = 0.8;
  ControlRun run = run_nonlinear_control(sys, lambda);
  NonlinearReduction red = reduce_nonlinear(sys);
  IrobdResult direct = run_irobd(red.instance, lambda);
  for (size_t t = 0; t < run.decisions.size(); ++t) {
    CHECK((run.decisions[t] - direct.trajectory.points[t]).norm() <= 1e-9);
    CHECK((run.states[t + 1] - run.decisions[t]).norm() == 0.0);
  }
  Trajectory traj;
  traj.points = run.decisions;
  CHECK(run.cost == doctest::Approx(evaluate_total(red.instance, traj).total).epsilon(1e-9));
}
