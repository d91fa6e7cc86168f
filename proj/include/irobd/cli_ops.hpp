#pragma once

#include <string>

#include "irobd/verify.hpp"

namespace irobd {

/// Expands a sweep specification (families × parameter grids × algorithms ×
/// λ grid × seeds) into one CSV row per (instance, algorithm) pair:
///   family,seed,params,alg,lambda,T,d,p,k,cost_alg,cost_opt,oracle,ratio,
///   bound_name,bound_value,bound_ok
/// Rows are emitted in grid order regardless of execution order, so output
/// is byte-identical for a fixed spec. Per-row failures become rows with an
/// error note; the sweep continues. Row evaluation parallelism is capped by
/// IROBD_THREADS.
std::string cmd_sweep(const std::string& spec_json);

struct VerifyOutcome {
  std::string report;
  bool ok = true;
};

/// Battery of registered inequality checks over seeded random instances and
/// plants (drift recursions, tracking bound, move-to-minimizer step bounds,
/// oracle agreement and dominance, reduction equivalence).
VerifyOutcome cmd_verify_battery(uint64_t seed, int instances, double lambda);

/// Checks applicable to one instance file's contents.
VerifyOutcome cmd_verify_instance(const std::string& instance_json, double lambda);

/// Re-audits a sweep CSV: fails on any row whose bound flag is "no" or that
/// recorded a per-row error.
VerifyOutcome cmd_verify_sweep(const std::string& csv);

}  // namespace irobd
