#include <doctest.h>

#include "irobd/algorithms.hpp"
#include "irobd/bounds.hpp"
#include "irobd/core.hpp"
#include "irobd/instances.hpp"
#include "irobd/json_io.hpp"
#include "irobd/offline.hpp"

using namespace irobd;

TEST_CASE("escalation family: stay-versus-adversary ratio is the closed form") {
  auto ratio_of = [](double m, double alpha, int k) {
    Instance inst = gen_thm3(m, alpha, k);
    const double stay = evaluate_total(inst, run_stay(inst)).total;
    const double adv = evaluate_total(inst, minimizer_trajectory(inst)).total;
    return stay / adv;
  };
  CHECK(ratio_of(1.0, 2.0, 3) == doctest::Approx(21.0).epsilon(1e-12));
  CHECK(ratio_of(1.0, 2.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ratio_of(3.0, 1.5, 2) == doctest::Approx(9.75).epsilon(1e-12));
  CHECK(ratio_of(2.0, 2.0, 4) ==
        doctest::Approx(ratio_lower_bound_delay(2.0, 2.0, 4)).epsilon(1e-12));
  CHECK_THROWS_AS(gen_thm3(1.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("single-step linear family") {
  Instance flat = gen_remark1(1.0, 0.0, 10, 3);
  CHECK(flat.switching.is_linear());
  CHECK(flat.switching.linear_maps()[0](0, 0) == 1.0);  // unit map at L = 0

  Instance steep = gen_remark1(1.0, 0.8, 10, 3);
  CHECK(steep.switching.linear_maps()[0](0, 0) == doctest::Approx(1.8));

  CHECK(to_json(gen_remark1(2.0, 0.5, 15, 42)) == to_json(gen_remark1(2.0, 0.5, 15, 42)));

  Instance sine = gen_remark1(1.0, 0.5, 10, 3, true);
  CHECK(sine.switching.kind() == SwitchingCost::Kind::Callback);
  // The sine deviation respects the declared slot constant of the total map.
  auto audit = validate_lipschitz(sine.switching, {{-4, 4}}, 4000, 5);
  CHECK(audit.ok);
}

TEST_CASE("plateau-sine family: pinned geometry and costs") {
  const double eps = 0.1, gamma = 0.01;
  const int n = 5;
  CHECK(plateau_sine_base(eps, gamma, n, n * eps / 2.0) == eps);  // left plateau
  CHECK(plateau_sine_base(eps, gamma, n, n * eps + gamma * eps) ==
        doctest::Approx(-eps).epsilon(1e-9));
  CHECK(plateau_sine_base(eps, gamma, n, 1.0) == -eps);
  CHECK(plateau_sine_base(eps, gamma, n, -3.0) == eps);  // plateau extends left

  Remark2Output game = gen_remark2(eps, gamma, n);
  CHECK(game.instance.T == n + 1);
  CHECK(game.instance.k == 0);
  const double yprime_cost = evaluate_total(game.instance, game.reference).total;
  CHECK(yprime_cost == doctest::Approx(3.0 * gamma * eps * eps).epsilon(1e-12));

  // Following the targets through round n leaves a forced step of at least
  // 2ε² afterwards, whatever the final point is (the exact floor is 2ε²/γ).
  const Instance& inst = game.instance;
  const Vec yn = inst.cost(n).minimizer;
  std::vector<Vec> mem = {yn};
  const Vec target = inst.switching.delta(mem);
  double floor_seen = std::numeric_limits<double>::infinity();
  for (double u = -2.0; u <= 2.0; u += 1e-3) {
    Vec y(1);
    y[0] = inst.cost(n + 1).minimizer[0] + u;
    const double step = inst.cost(n + 1).value(y) + 0.5 * (y - target).squaredNorm();
    floor_seen = std::min(floor_seen, step);
  }
  CHECK(floor_seen >= 2.0 * eps * eps - 1e-9);
  CHECK(floor_seen == doctest::Approx(2.0 * eps * eps / gamma).epsilon(1e-3));
}

TEST_CASE("plateau-sine family: adaptive game") {
  Remark2Output game = gen_remark2(0.1, 0.02, 5);
  PlateauGame tracked = play_plateau_game(
      game, [](const Instance& inst) { return run_robd(inst, 1.0); });
  CHECK_FALSE(tracked.deviated);
  CHECK(tracked.ratio >= 2.0 / (3.0 * 0.02) * 0.99);

  PlateauGame stayed = play_plateau_game(
      game, [](const Instance& inst) { return run_stay(inst); });
  CHECK(stayed.deviated);
  CHECK(std::isinf(stayed.ratio));
  CHECK(stayed.stop_round == 1);
}

TEST_CASE("velocity-tracking family") {
  Instance plain = gen_drone(0.0, 0.0, 5, 0, DroneProfile::Hover, 1);
  Trajectory still = run_stay(plain);
  CHECK(evaluate_total(plain, still).total == 0.0);  // no gravity, hovering free

  Instance hover = gen_drone(0.1, 0.01, 10, 0, DroneProfile::Hover, 1);
  const double opt = solve_offline(hover).cost;
  CHECK(opt > 0.0);  // holding velocity zero still pays for the offset

  Instance cruise = gen_drone(0.1, 0.0, 8, 0, DroneProfile::Cruise, 1);
  const double dp = offline_objective(cruise, solve_offline_dp(cruise));
  const double ms = offline_objective(cruise, solve_offline_multistart(cruise, 16, 2));
  CHECK(std::abs(dp - ms) <= 1e-3);
}

TEST_CASE("random family: determinism and construction targets") {
  RandomSpec spec;
  spec.seed = 2024;
  spec.T = 9;
  spec.d = 3;
  spec.p = 2;
  spec.k = 2;
  spec.m = 0.5;
  spec.l = 2.0;
  spec.alpha = 0.9;
  CHECK(to_json(gen_random(spec)) == to_json(gen_random(spec)));

  Instance inst = gen_random(spec);
  CHECK(inst.switching.alpha() == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(inst.m >= 0.5 - 1e-12);
  CHECK(inst.l <= 2.0 + 1e-12);

  spec.l = spec.m;
  Instance iso = gen_random(spec);
  for (const HittingCost& c : iso.costs) {
    CHECK(c.geometry.is_isotropic());
    CHECK(c.geometry.iso() == 0.5);
  }
}

TEST_CASE("every generator output passes validation and its own audit") {
  std::vector<Instance> all;
  all.push_back(gen_thm3(1.0, 2.0, 3));
  all.push_back(gen_remark1(1.0, 0.5, 12, 7));
  all.push_back(gen_remark2(0.1, 0.05, 4).instance);
  all.push_back(gen_drone(0.1, 0.01, 12, 2, DroneProfile::Walk, 7));
  RandomSpec spec;
  spec.seed = 5;
  spec.T = 8;
  spec.d = 2;
  spec.p = 2;
  spec.k = 1;
  spec.m = 0.7;
  spec.l = 1.3;
  spec.alpha = 0.6;
  all.push_back(gen_random(spec));

  for (const Instance& inst : all) {
    CHECK_NOTHROW(inst.validate());
    std::vector<std::pair<double, double>> box(inst.d, {-4.0, 4.0});
    if (inst.switching.kind() == SwitchingCost::Kind::AffineDrone) {
      const double b = inst.switching.drone_box();
      box.assign(1, {-b, b});
    }
    auto audit = validate_lipschitz(inst.switching, box, 3000, 11);
    CHECK(audit.ok);
  }
}
