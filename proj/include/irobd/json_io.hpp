#pragma once

#include <string>

#include "irobd/reductions.hpp"
#include "irobd/types.hpp"

namespace irobd {

/// 17-significant-digit fixed formatting so serialized artifacts are
/// byte-identical across runs and round-trip exactly.
std::string format_double(double x);

/// Instance schema, fixed field order:
/// {T, d, k, prehistory, switching: {kind, params}, costs: [{Q|m, v}]}.
/// Switching kinds: "linear" (C: list of d×d matrices), "drone"
/// (C1, C2, box), "remark2" (eps, gamma, n, scale). Callback maps have no
/// file form. A missing prehistory parses as all-zeros.
std::string to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

std::string to_json(const Trajectory& traj, const CostReport* report = nullptr);

/// Control-system schema: {"kind":"linear", A, B, q, w, x0} or
/// {"kind":"nonlinear", A, g:{kind,…}, L, Q, v, delay, x0} with g kinds
/// "zero", "drone" (C1, C2) and "sine" (amp, freq).
std::string to_json(const LinearControlSystem& sys);
LinearControlSystem linear_system_from_json(const std::string& text);
NonlinearControlSystem nonlinear_system_from_json(const std::string& text);
std::string system_kind_from_json(const std::string& text);

}  // namespace irobd
