#include "irobd/algorithms.hpp"

#include <sstream>

#include "irobd/core.hpp"

namespace irobd {

namespace {
void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

// --------------------------- ProtocolView ----------------------------------

void ProtocolView::begin_round(int t) {
  if (t < round_) throw ProtocolViolation("ProtocolView: rounds must advance monotonically");
  if (t < 1 || t > inst_.T) throw ProtocolViolation("ProtocolView: round out of range");
  round_ = t;
}

const Quadratic& ProtocolView::geometry(int s) const {
  if (s < 1 || s > round_) {
    std::ostringstream msg;
    msg << "ProtocolView: geometry of round " << s << " is not visible at round " << round_;
    throw ProtocolViolation(msg.str());
  }
  return inst_.cost(s).geometry;
}

const Vec& ProtocolView::minimizer(int s) const {
  if (s < 1 || s > round_ - inst_.k) {
    std::ostringstream msg;
    msg << "ProtocolView: minimizer of round " << s << " is not revealed at round " << round_
        << " (delay " << inst_.k << ")";
    throw ProtocolViolation(msg.str());
  }
  return inst_.cost(s).minimizer;
}

HittingCost ProtocolView::revealed_cost(int s) const {
  HittingCost f;
  f.geometry = geometry(s);
  f.minimizer = minimizer(s);
  f.reveal_round = inst_.cost(s).reveal_round;
  return f;
}

// --------------------------- IrobdOnline -----------------------------------

IrobdOnline::IrobdOnline(SwitchingCost sw, std::vector<Vec> prehistory, int delay, double lambda,
                         SolverConfig cfg)
    : sw_(std::move(sw)),
      prehistory_(std::move(prehistory)),
      delay_(delay),
      lambda_(lambda),
      cfg_(cfg) {
  require(delay_ >= 0, "IrobdOnline: delay must be non-negative");
  require(lambda_ > 0, "IrobdOnline: lambda must be positive");
  require(static_cast<int>(prehistory_.size()) == sw_.memory(),
          "IrobdOnline: prehistory must hold p vectors");
}

std::vector<Vec> IrobdOnline::window(const std::vector<Vec>& seq, int t) const {
  std::vector<Vec> mem;
  mem.reserve(sw_.memory());
  for (int i = 1; i <= sw_.memory(); ++i) {
    const int s = t - i;
    mem.push_back(s >= 1 ? seq.at(s - 1) : prehistory_.at(-s));
  }
  return mem;
}

Vec IrobdOnline::step(const Quadratic& geometry, const std::optional<Vec>& revealed_minimizer) {
  ++t_;
  geometries_.push_back(geometry);
  if (t_ > delay_) {
    require(revealed_minimizer.has_value(),
            "IrobdOnline: round t > delay must reveal the minimizer of round t-delay");
    minimizers_.push_back(*revealed_minimizer);
    // Recover the no-delay decision for the newly completed round. Inputs at
    // this index never change, so the value is computed once and kept.
    const int s = t_ - delay_;
    HittingCost f;
    f.geometry = geometries_.at(s - 1);
    f.minimizer = minimizers_.at(s - 1);
    try {
      oracle_.push_back(robd_minimize(f, sw_, window(oracle_, s), lambda_, 0.0, cfg_));
    } catch (SolverFailure& e) {
      e.step = s;
      throw;
    }
  } else {
    require(!revealed_minimizer.has_value(),
            "IrobdOnline: no minimizer is revealed while t <= delay");
  }

  // Temporary sequence: the revealed prefix, then one optimistic estimate and
  // solve per unrevealed round.
  std::vector<Vec> s_seq = oracle_;
  for (int i = static_cast<int>(oracle_.size()) + 1; i <= t_; ++i) {
    std::vector<Vec> mem = window(s_seq, i);
    Vec estimate = estimate_minimizer(geometries_.at(i - 1), sw_, mem, lambda_, cfg_);
    try {
      s_seq.push_back(robd_minimize(geometries_.at(i - 1), estimate, sw_, mem, lambda_, 0.0, cfg_));
    } catch (SolverFailure& e) {
      e.step = i;
      throw;
    }
  }
  return s_seq.back();
}

// --------------------------- Runners ----------------------------------------

Trajectory run_robd(const Instance& inst, double lambda1, double lambda2,
                    const SolverConfig& cfg) {
  require(inst.k == 0, "run_robd: instance must have zero delay");
  Trajectory traj;
  traj.label = "robd";
  for (int t = 1; t <= inst.T; ++t) {
    std::vector<Vec> mem = memory_window(inst, traj.points, t);
    try {
      traj.points.push_back(robd_minimize(inst.cost(t), inst.switching, mem, lambda1, lambda2, cfg));
    } catch (SolverFailure& e) {
      e.step = t;
      throw;
    }
  }
  return traj;
}

IrobdResult run_irobd(const Instance& inst, double lambda, const SolverConfig& cfg) {
  require(lambda > 0, "run_irobd: lambda must be positive");
  ProtocolView view(inst);
  IrobdOnline online(inst.switching, inst.prehistory, inst.k, lambda, cfg);
  IrobdResult result;
  result.trajectory.label = "irobd";
  for (int t = 1; t <= inst.T; ++t) {
    view.begin_round(t);
    std::optional<Vec> reveal;
    if (t > inst.k) reveal = view.minimizer(t - inst.k);
    result.trajectory.points.push_back(online.step(view.geometry(t), reveal));
  }
  result.sweep = delay_sweep(inst, lambda, cfg);
  return result;
}

Trajectory run_delayed_m2m(const Instance& inst, const SolverConfig&) {
  const SwitchingCost& sw = inst.switching;
  bool plain = sw.is_linear() && sw.memory() == 1 &&
               (sw.linear_maps()[0] - Mat::Identity(inst.d, inst.d)).norm() <= 1e-12;
  require(plain, "run_delayed_m2m: requires single-step unit-map switching cost");
  Trajectory traj;
  traj.label = "m2m";
  for (int t = 1; t <= inst.T; ++t)
    traj.points.push_back(t <= inst.k ? inst.past(0) : inst.cost(t - inst.k).minimizer);
  return traj;
}

Trajectory run_stay(const Instance& inst) {
  Trajectory traj;
  traj.label = "stay";
  traj.points.assign(inst.T, inst.past(0));
  return traj;
}

DelaySweep delay_sweep(const Instance& inst, double lambda, const SolverConfig& cfg) {
  require(lambda > 0, "delay_sweep: lambda must be positive");
  const int p = inst.switching.memory();
  DelaySweep sweep;
  sweep.decisions.assign(inst.k + 1, {});
  sweep.estimates.assign(inst.k + 1, {});

  // Row j at round t draws memory slot i from row j−i at round t−i (clamped
  // at row 0); rounds ≤ 0 come from the shared prehistory.
  for (int j = 0; j <= inst.k; ++j) {
    for (int t = 1; t <= inst.T; ++t) {
      std::vector<Vec> mem;
      mem.reserve(p);
      for (int i = 1; i <= p; ++i) {
        const int s = t - i;
        if (s >= 1) {
          mem.push_back(sweep.decisions[std::max(0, j - i)].at(s - 1));
        } else {
          mem.push_back(inst.past(s));
        }
      }
      Vec v = j == 0 ? inst.cost(t).minimizer
                     : estimate_minimizer(inst.cost(t).geometry, inst.switching, mem, lambda, cfg);
      try {
        sweep.decisions[j].push_back(
            robd_minimize(inst.cost(t).geometry, v, inst.switching, mem, lambda, 0.0, cfg));
      } catch (SolverFailure& e) {
        e.step = t;
        throw;
      }
      sweep.estimates[j].push_back(std::move(v));
    }
  }
  return sweep;
}

}  // namespace irobd
