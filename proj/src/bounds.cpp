#include "irobd/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace irobd {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

double ratio_bound_nonlinear_soco(double m, double L, double lambda) {
  require(m > 0, "ratio_bound_nonlinear_soco: m must be positive");
  require(L >= 0, "ratio_bound_nonlinear_soco: L must be non-negative");
  require(lambda > 0, "ratio_bound_nonlinear_soco: lambda must be positive");
  const double denom = m - L * (L + 2.0) * lambda;
  require(denom > 0, "ratio_bound_nonlinear_soco: m - L(L+2)λ must be positive");
  return std::max(1.0 / lambda, (m + lambda) / denom);
}

OptimizedBound ratio_bound_nonlinear_soco_opt(double m, double L) {
  require(m > 0, "ratio_bound_nonlinear_soco_opt: m must be positive");
  require(L >= 0, "ratio_bound_nonlinear_soco_opt: L must be non-negative");
  const double a = m + 2.0 * L + L * L;
  OptimizedBound out;
  out.lambda = (-a + std::sqrt(a * a + 4.0 * m)) / 2.0;
  const double r = 1.0 + (2.0 * L + L * L) / m;
  out.value = 0.5 * (r + std::sqrt(r * r + 4.0 / m));
  return out;
}

double ratio_bound_nonlinear_delay(double m, double l, int p, double L, int k, double lambda) {
  require(m > 0 && l >= m, "ratio_bound_nonlinear_delay: need 0 < m <= l");
  require(p >= 1 && k >= 0, "ratio_bound_nonlinear_delay: bad memory or delay");
  require(L >= 0, "ratio_bound_nonlinear_delay: L must be non-negative");
  require(lambda > 0, "ratio_bound_nonlinear_delay: lambda must be positive");
  const double pl2 = static_cast<double>(p) * p * L * L;
  const double denom = m + (1.0 - pl2) * lambda;
  require(denom > 0, "ratio_bound_nonlinear_delay: m + (1 - p²L²)λ must be positive");
  return std::pow(l + 2.0 * pl2, k) * std::max(1.0 / lambda, (m + lambda) / denom);
}

double ratio_bound_linear_delay(double m, double l, double alpha, int k, double lambda) {
  require(m > 0 && l >= m, "ratio_bound_linear_delay: need 0 < m <= l");
  require(alpha >= 0 && k >= 0, "ratio_bound_linear_delay: bad alpha or delay");
  require(lambda > 0, "ratio_bound_linear_delay: lambda must be positive");
  const double a2 = alpha * alpha;
  const double denom = m + (1.0 - a2) * lambda;
  require(denom > 0, "ratio_bound_linear_delay: m + (1 - α²)λ must be positive");
  return std::pow(l + 2.0 * a2, k) * std::max(1.0 / lambda, (m + lambda) / denom);
}

double ratio_lower_bound_delay(double m, double alpha, int k) {
  require(m > 0, "ratio_lower_bound_delay: m must be positive");
  require(alpha > 1, "ratio_lower_bound_delay: alpha must exceed 1");
  require(k >= 1, "ratio_lower_bound_delay: delay must be >= 1");
  // (α^{2k} − 1)/(α² − 1) = Σ_{i<k} α^{2i}; the sum form is exact for
  // integer k and has no pole as α approaches 1.
  double sum = 0, term = 1;
  const double a2 = alpha * alpha;
  for (int i = 0; i < k; ++i) {
    sum += term;
    term *= a2;
  }
  return m * sum;
}

double ratio_bound_linear_memory(double m, double alpha) {
  require(m > 0, "ratio_bound_linear_memory: m must be positive");
  require(alpha >= 0, "ratio_bound_linear_memory: alpha must be non-negative");
  const double r = 1.0 + (alpha * alpha - 1.0) / m;
  return 0.5 * (r + std::sqrt(r * r + 4.0 / m));
}

}  // namespace irobd
