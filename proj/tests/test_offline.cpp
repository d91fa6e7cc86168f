#include <doctest.h>

#include "irobd/algorithms.hpp"
#include "irobd/core.hpp"
#include "irobd/instances.hpp"
#include "irobd/offline.hpp"
#include "irobd/rng.hpp"
#include "irobd/verify.hpp"

using namespace irobd;

namespace {

Vec vec1(double a) {
  Vec v(1);
  v[0] = a;
  return v;
}

Instance soco1(int T, double m, std::vector<double> vs) {
  Instance inst;
  inst.T = T;
  inst.d = 1;
  inst.k = 0;
  inst.switching = SwitchingCost::linear({Mat::Identity(1, 1)});
  inst.prehistory = {vec1(0)};
  for (double v : vs) {
    HittingCost c;
    c.geometry = Quadratic::isotropic(1, m);
    c.minimizer = vec1(v);
    inst.costs.push_back(c);
  }
  inst.finalize();
  return inst;
}

}  // namespace

TEST_CASE("exact solve: pinned cases") {
  Instance zeros = soco1(4, 1.0, {0, 0, 0, 0});
  Trajectory opt = solve_offline_convex(zeros);
  CHECK(offline_objective(zeros, opt) == doctest::Approx(0.0).epsilon(1e-12));

  // T=2, m=1, unit map, targets (1,1): stationarity is a 2×2 linear system
  // with solution (0.6, 0.8).
  Instance two = soco1(2, 1.0, {1, 1});
  opt = solve_offline_convex(two);
  CHECK(opt.points[0][0] == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(opt.points[1][0] == doctest::Approx(0.8).epsilon(1e-10));
  Trajectory dp = solve_offline_dp(two);
  CHECK(offline_objective(two, dp) ==
        doctest::Approx(offline_objective(two, opt)).epsilon(1e-5));

  Instance esc = gen_thm3(1.0, 2.0, 3);
  CHECK(offline_objective(esc, solve_offline_convex(esc)) <= 0.5 + 1e-12);
}

TEST_CASE("table oracle: pinned cases") {
  Remark2Output game = gen_remark2(0.1, 0.01, 5);
  GridSpec fine;
  fine.cells = 4001;
  Trajectory dp = solve_offline_dp(game.instance, fine);
  const double bound = 3.0 * 0.01 * 0.1 * 0.1;
  CHECK(offline_objective(game.instance, dp) <= bound + 1e-6);

  // Explicit bracket around the climb, in instance coordinates.
  GridSpec snug;
  snug.auto_bracket = false;
  snug.lo = game.scale * -0.2;
  snug.hi = game.scale * (5 * 0.1 + 2 * 0.01 * 0.1);
  snug.cells = 4001;
  CHECK(offline_objective(game.instance, solve_offline_dp(game.instance, snug)) <=
        bound + 1e-6);

  Instance zeros = soco1(5, 1.0, {0, 0, 0, 0, 0});
  CHECK(offline_objective(zeros, solve_offline_dp(zeros)) == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(5);
  std::vector<double> vs;
  for (int i = 0; i < 5; ++i) vs.push_back(rng.uniform(-2, 2));
  Instance random5 = soco1(5, 1.0, vs);
  GridSpec grid;
  grid.auto_bracket = false;
  grid.lo = -5;
  grid.hi = 5;
  grid.cells = 4001;
  const double dp_cost = offline_objective(random5, solve_offline_dp(random5, grid));
  const double cv_cost = offline_objective(random5, solve_offline_convex(random5));
  CHECK(std::abs(dp_cost - cv_cost) <= 1e-4);
}

TEST_CASE("table oracle: limits and refusals") {
  Instance inst = soco1(3, 1.0, {1, 2, 3});
  inst.switching = SwitchingCost::linear(
      {Mat::Identity(1, 1), Mat(0.5 * Mat::Identity(1, 1)), Mat(0.1 * Mat::Identity(1, 1))});
  inst.prehistory.assign(3, vec1(0));
  inst.finalize();
  CHECK_THROWS_AS(solve_offline_dp(inst), std::invalid_argument);  // p > 2

  Instance two = soco1(3, 1.0, {1, 2, 3});
  two.switching = SwitchingCost::linear({Mat::Identity(1, 1), Mat(0.3 * Mat::Identity(1, 1))});
  two.prehistory.assign(2, vec1(0));
  two.finalize();
  GridSpec big;
  big.cells = 200000;  // p=2 table at this resolution would be hundreds of GB
  CHECK_THROWS_AS(solve_offline_dp(two, big), std::invalid_argument);
  GridSpec small;
  small.cells = 151;
  const double dp2 = offline_objective(two, solve_offline_dp(two, small));
  const double cv2 = offline_objective(two, solve_offline_convex(two));
  CHECK(dp2 >= cv2 - 1e-12);
  CHECK(std::abs(dp2 - cv2) <= 2e-2);
}

TEST_CASE("multistart descent: pinned cases") {
  Instance linear = soco1(6, 1.2, {0.5, -0.3, 0.8, 0.2, 0.0, -0.6});
  const double ms = offline_objective(linear, solve_offline_multistart(linear, 8, 3));
  const double cv = offline_objective(linear, solve_offline_convex(linear));
  CHECK(std::abs(ms - cv) <= 1e-6);

  // 1-D nonlinear map: agree with the table oracle.
  RandomSpec spec;
  spec.seed = 9;
  spec.T = 8;
  spec.d = 1;
  spec.p = 1;
  spec.k = 0;
  spec.m = 1.0;
  spec.l = 1.0;
  spec.delta_kind = RandomSpec::DeltaKind::Drone;
  Instance drone = gen_random(spec);
  const double msd = offline_objective(drone, solve_offline_multistart(drone, 16, 3));
  GridSpec fine;
  fine.cells = 4001;
  const double dpd = offline_objective(drone, solve_offline_dp(drone, fine));
  CHECK(msd <= dpd + 1e-6);
  CHECK(std::abs(msd - dpd) <= 1e-3);

  // Targets on the free rollout: zero cost is attainable and found.
  Instance free_path = soco1(5, 1.0, {0, 0, 0, 0, 0});
  Instance rolled = free_path;
  Trajectory roll = rollout_trajectory(free_path);
  for (int t = 0; t < 5; ++t) rolled.costs[t].minimizer = roll.points[t];
  rolled.finalize();
  CHECK(offline_objective(rolled, solve_offline_multistart(rolled, 4, 1)) <=
        doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(solve_offline_multistart(linear, 0, 1), std::invalid_argument);
}

TEST_CASE("oracle dispatch and provenance") {
  Instance linear = soco1(4, 1.0, {1, 0, 1, 0});
  CHECK(solve_offline(linear).method == "convex");

  RandomSpec spec;
  spec.seed = 4;
  spec.T = 6;
  spec.d = 1;
  spec.p = 1;
  spec.k = 0;
  spec.m = 1.0;
  spec.l = 1.0;
  spec.delta_kind = RandomSpec::DeltaKind::Drone;
  CHECK(solve_offline(gen_random(spec)).method == "dp");
}

TEST_CASE("oracle dominance and stationarity") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    RandomSpec spec;
    spec.seed = rng.next();
    spec.T = 10;
    spec.d = 2;
    spec.p = 2;
    spec.k = 1;
    spec.m = 0.6;
    spec.l = 1.4;
    spec.alpha = 0.35;
    Instance inst = gen_random(spec);
    std::vector<Trajectory> algs = {full_information_robd(inst, 0.7),
                                    run_irobd(inst, 0.7).trajectory, run_stay(inst),
                                    minimizer_trajectory(inst)};
    CHECK(check_oracle_dominance(inst, algs).pass);
  }
}

TEST_CASE("offline cost is translation-covariant for the unit map") {
  Instance inst = soco1(6, 1.1, {0.5, -0.3, 0.8, 0.2, 0.0, -0.6});
  const double base = offline_objective(inst, solve_offline_convex(inst));
  Instance moved = inst;
  const double shift = 1.234;
  for (HittingCost& c : moved.costs) c.minimizer[0] += shift;
  for (Vec& y : moved.prehistory) y[0] += shift;
  moved.finalize();
  Trajectory opt = solve_offline_convex(moved);
  CHECK(offline_objective(moved, opt) == doctest::Approx(base).epsilon(1e-10));
  Trajectory unshifted = solve_offline_convex(inst);
  for (int t = 0; t < inst.T; ++t)
    CHECK(opt.points[t][0] - shift == doctest::Approx(unshifted.points[t][0]).epsilon(1e-9));
}

TEST_CASE("oracle agreement on 1-D linear instances") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    RandomSpec spec;
    spec.seed = seed;
    spec.T = 7;
    spec.d = 1;
    spec.p = 1;
    spec.k = 0;
    spec.m = 1.0;
    spec.l = 1.0;
    spec.alpha = 0.6;
    CHECK(check_oracle_agreement(gen_random(spec)).pass);
  }
}
