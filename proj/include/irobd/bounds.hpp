#pragma once

#include <utility>

namespace irobd {

/// Competitive-ratio guarantee for no-delay balanced descent with a
/// single-step switching cost written as ½‖y_t − y_{t−1} − g(y_{t−1})‖²,
/// where L bounds the deviation map g:
///   max{ 1/λ, (m+λ)/(m − L(L+2)λ) },  valid while m − L(L+2)λ > 0.
double ratio_bound_nonlinear_soco(double m, double L, double lambda);

struct OptimizedBound {
  double lambda;
  double value;
};

/// The balance point of the two branches above and its value,
///   λ* = (−(m+2L+L²) + √((m+2L+L²)² + 4m)) / 2,
///   value ½(1 + (2L+L²)/m + √((1+(2L+L²)/m)² + 4/m)).
OptimizedBound ratio_bound_nonlinear_soco_opt(double m, double L);

/// Theory shape for delay-k runs with a general L-Lipschitz memory map
/// (multiplicative constant suppressed):
///   (l + 2p²L²)^k · max{ 1/λ, (m+λ)/(m + (1−p²L²)λ) }.
double ratio_bound_nonlinear_delay(double m, double l, int p, double L, int k, double lambda);

/// Theory shape for delay-k runs with linear memory maps, α = Σ‖C_i‖:
///   (l + 2α²)^k · max{ 1/λ, (m+λ)/(m + (1−α²)λ) }.
double ratio_bound_linear_delay(double m, double l, double alpha, int k, double lambda);

/// Worst-case lower bound for any online algorithm under delay k with the
/// escalating map ½‖y_t − αy_{t−1}‖², α > 1:
///   m(α^{2k} − 1)/(α² − 1), evaluated as m·Σ_{i<k} α^{2i} (stable at α→1⁺).
double ratio_lower_bound_delay(double m, double alpha, int k);

/// Prior no-delay guarantee for linear memory maps at the optimal λ:
///   ½(1 + (α²−1)/m + √((1+(α²−1)/m)² + 4/m)).
double ratio_bound_linear_memory(double m, double alpha);

}  // namespace irobd
