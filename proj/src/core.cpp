#include "irobd/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "irobd/rng.hpp"

namespace irobd {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

// --------------------------- Quadratic -------------------------------------

Quadratic Quadratic::isotropic(int dim, double curvature) {
  require(dim >= 1, "Quadratic: dimension must be positive");
  require(curvature > 0, "Quadratic: curvature must be positive");
  Quadratic q;
  q.dim_ = dim;
  q.iso_ = curvature;
  q.emin_ = q.emax_ = curvature;
  return q;
}

Quadratic Quadratic::dense(Mat m) {
  require(m.rows() == m.cols() && m.rows() >= 1, "Quadratic: matrix must be square");
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + m.cwiseAbs().maxCoeff()),
          "Quadratic: matrix must be symmetric");
  Quadratic q;
  q.dim_ = static_cast<int>(m.rows());
  q.q_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(q.q_, Eigen::EigenvaluesOnly);
  q.emin_ = es.eigenvalues().minCoeff();
  q.emax_ = es.eigenvalues().maxCoeff();
  require(q.emin_ > 0, "Quadratic: matrix must be positive definite");
  return q;
}

double Quadratic::value(const Vec& x) const {
  require(x.size() == dim_, "Quadratic: dimension mismatch");
  if (is_isotropic()) return 0.5 * iso_ * x.squaredNorm();
  return 0.5 * x.dot(q_ * x);
}

Vec Quadratic::apply(const Vec& x) const {
  require(x.size() == dim_, "Quadratic: dimension mismatch");
  if (is_isotropic()) return iso_ * x;
  return q_ * x;
}

Vec Quadratic::solve_shifted(double shift, const Vec& rhs) const {
  require(rhs.size() == dim_, "Quadratic: dimension mismatch");
  if (is_isotropic()) return rhs / (iso_ + shift);
  Mat sys = q_;
  sys.diagonal().array() += shift;
  return sys.ldlt().solve(rhs);
}

double HittingCost::value(const Vec& y) const {
  require(y.size() == minimizer.size(), "HittingCost: dimension mismatch");
  return geometry.value(y - minimizer);
}

// --------------------------- SwitchingCost ---------------------------------

SwitchingCost SwitchingCost::linear(std::vector<Mat> maps) {
  require(!maps.empty(), "SwitchingCost: at least one memory map required");
  const int d = static_cast<int>(maps.front().rows());
  SwitchingCost sw;
  sw.kind_ = Kind::Linear;
  sw.p_ = static_cast<int>(maps.size());
  sw.d_ = d;
  for (const Mat& c : maps) {
    require(c.rows() == d && c.cols() == d, "SwitchingCost: maps must be d×d");
    Eigen::JacobiSVD<Mat> svd(c);
    sw.lipschitz_.push_back(svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
  }
  sw.maps_ = std::move(maps);
  return sw;
}

SwitchingCost SwitchingCost::affine_drone(double c1, double c2, double box) {
  require(c1 >= 0 && c2 >= 0, "SwitchingCost: drone coefficients must be non-negative");
  require(box > 0, "SwitchingCost: operating box must be positive");
  SwitchingCost sw;
  sw.kind_ = Kind::AffineDrone;
  sw.p_ = 1;
  sw.d_ = 1;
  sw.c1_ = c1;
  sw.c2_ = c2;
  sw.box_ = box;
  sw.lipschitz_ = {1.0 + 2.0 * c2 * box};
  return sw;
}

SwitchingCost SwitchingCost::plateau_sine(double eps, double gamma, int n, double scale) {
  require(eps > 0, "SwitchingCost: eps must be positive");
  require(gamma > 0 && gamma < 1, "SwitchingCost: gamma must lie in (0,1)");
  require(n >= 1, "SwitchingCost: n must be positive");
  require(scale > 0, "SwitchingCost: scale must be positive");
  SwitchingCost sw;
  sw.kind_ = Kind::PlateauSine;
  sw.p_ = 1;
  sw.d_ = 1;
  sw.eps_ = eps;
  sw.gamma_ = gamma;
  sw.n_ = n;
  sw.scale_ = scale;
  sw.lipschitz_ = {1.0 + kPi / gamma};
  return sw;
}

SwitchingCost SwitchingCost::callback(int dim, int memory, DeltaFn fn,
                                      std::vector<double> lipschitz, JacobianFn jacobian) {
  require(dim >= 1 && memory >= 1, "SwitchingCost: bad dimensions");
  require(static_cast<int>(lipschitz.size()) == memory,
          "SwitchingCost: one Lipschitz constant per memory slot required");
  for (double c : lipschitz) require(c >= 0, "SwitchingCost: Lipschitz constants must be >= 0");
  SwitchingCost sw;
  sw.kind_ = Kind::Callback;
  sw.p_ = memory;
  sw.d_ = dim;
  sw.fn_ = std::move(fn);
  sw.jac_ = std::move(jacobian);
  sw.lipschitz_ = std::move(lipschitz);
  return sw;
}

double SwitchingCost::scalar_delta(double y) const {
  if (kind_ == Kind::AffineDrone) return y - (c1_ + c2_ * std::abs(y) * y);
  // Plateau-sine in instance coordinates: scale_·base(y/scale_) added to y.
  const double u = y / scale_;
  const double a = n_ * eps_;
  const double b = a + gamma_ * eps_;
  double base;
  if (u <= a) {
    base = eps_;
  } else if (u <= b) {
    base = -eps_ * std::sin(kPi / (gamma_ * eps_) * u - n_ * kPi / gamma_ - kPi / 2.0);
  } else {
    base = -eps_;
  }
  return y + scale_ * base;
}

double SwitchingCost::scalar_slope(double y) const {
  if (kind_ == Kind::AffineDrone) return 1.0 - 2.0 * c2_ * std::abs(y);
  const double u = y / scale_;
  const double a = n_ * eps_;
  const double b = a + gamma_ * eps_;
  if (u <= a || u > b) return 1.0;
  const double w = kPi / (gamma_ * eps_);
  return 1.0 - eps_ * w * std::cos(w * u - n_ * kPi / gamma_ - kPi / 2.0);
}

Vec SwitchingCost::delta(const std::vector<Vec>& mem) const {
  require(static_cast<int>(mem.size()) == p_, "SwitchingCost: memory window must hold p vectors");
  for (const Vec& y : mem)
    require(y.size() == d_, "SwitchingCost: memory vector dimension mismatch");
  switch (kind_) {
    case Kind::Linear: {
      Vec out = Vec::Zero(d_);
      for (int i = 0; i < p_; ++i) out += maps_[i] * mem[i];
      return out;
    }
    case Kind::AffineDrone:
    case Kind::PlateauSine: {
      Vec out(1);
      out[0] = scalar_delta(mem[0][0]);
      return out;
    }
    case Kind::Callback:
      return fn_(mem);
  }
  throw std::logic_error("SwitchingCost: unreachable");
}

Mat SwitchingCost::delta_jacobian(const std::vector<Vec>& mem, int slot) const {
  require(slot >= 0 && slot < p_, "SwitchingCost: slot out of range");
  switch (kind_) {
    case Kind::Linear:
      return maps_[slot];
    case Kind::AffineDrone:
    case Kind::PlateauSine: {
      Mat j(1, 1);
      j(0, 0) = scalar_slope(mem[0][0]);
      return j;
    }
    case Kind::Callback: {
      if (jac_) return jac_(mem, slot);
      // Central finite differences, slot coordinates perturbed one at a time.
      const double h = 1e-6;
      Mat j(d_, d_);
      std::vector<Vec> work = mem;
      for (int c = 0; c < d_; ++c) {
        work[slot] = mem[slot];
        work[slot][c] += h;
        Vec hi = delta(work);
        work[slot][c] -= 2 * h;
        Vec lo = delta(work);
        j.col(c) = (hi - lo) / (2 * h);
      }
      return j;
    }
  }
  throw std::logic_error("SwitchingCost: unreachable");
}

double SwitchingCost::alpha() const {
  double a = 0;
  for (double c : lipschitz_) a += c;
  return a;
}

double SwitchingCost::max_lipschitz() const {
  return *std::max_element(lipschitz_.begin(), lipschitz_.end());
}

const std::vector<Mat>& SwitchingCost::linear_maps() const {
  if (kind_ != Kind::Linear) throw std::invalid_argument("SwitchingCost: not a linear map");
  return maps_;
}

std::vector<double> SwitchingCost::grid_anchors() const {
  if (kind_ == Kind::PlateauSine) {
    const double a = scale_ * n_ * eps_;
    return {a, a + scale_ * gamma_ * eps_};
  }
  return {};
}

double SwitchingCost::drone_c1() const {
  if (kind_ != Kind::AffineDrone) throw std::invalid_argument("SwitchingCost: not a drone map");
  return c1_;
}
double SwitchingCost::drone_c2() const {
  if (kind_ != Kind::AffineDrone) throw std::invalid_argument("SwitchingCost: not a drone map");
  return c2_;
}
double SwitchingCost::drone_box() const {
  if (kind_ != Kind::AffineDrone) throw std::invalid_argument("SwitchingCost: not a drone map");
  return box_;
}
double SwitchingCost::sine_eps() const {
  if (kind_ != Kind::PlateauSine) throw std::invalid_argument("SwitchingCost: not a plateau-sine map");
  return eps_;
}
double SwitchingCost::sine_gamma() const {
  if (kind_ != Kind::PlateauSine) throw std::invalid_argument("SwitchingCost: not a plateau-sine map");
  return gamma_;
}
int SwitchingCost::sine_n() const {
  if (kind_ != Kind::PlateauSine) throw std::invalid_argument("SwitchingCost: not a plateau-sine map");
  return n_;
}
double SwitchingCost::sine_scale() const {
  if (kind_ != Kind::PlateauSine) throw std::invalid_argument("SwitchingCost: not a plateau-sine map");
  return scale_;
}

// --------------------------- Instance --------------------------------------

void Instance::finalize() {
  for (int t = 1; t <= T; ++t) costs[t - 1].reveal_round = t + k;
  m = std::numeric_limits<double>::infinity();
  l = 0;
  for (const HittingCost& c : costs) {
    m = std::min(m, c.geometry.min_curvature());
    l = std::max(l, c.geometry.max_curvature());
  }
  if (prehistory.empty()) prehistory.assign(switching.memory(), Vec::Zero(d));
  validate();
}

void Instance::validate() const {
  require(T >= 1, "Instance: horizon must be positive");
  require(d >= 1, "Instance: dimension must be positive");
  require(k >= 0, "Instance: delay must be non-negative");
  require(k <= T, "Instance: delay must not exceed the horizon");
  require(static_cast<int>(costs.size()) == T, "Instance: one hitting cost per round required");
  require(switching.dim() == d, "Instance: switching cost dimension mismatch");
  require(static_cast<int>(prehistory.size()) == switching.memory(),
          "Instance: prehistory must hold p vectors");
  for (const HittingCost& c : costs) {
    require(c.dim() == d, "Instance: hitting cost dimension mismatch");
    require(c.minimizer.size() == d, "Instance: minimizer dimension mismatch");
    require(c.minimizer.allFinite(), "Instance: minimizer must be finite");
  }
  for (const Vec& y : prehistory) {
    require(y.size() == d, "Instance: prehistory dimension mismatch");
    require(y.allFinite(), "Instance: prehistory must be finite");
  }
  require(m > 0, "Instance: hitting costs must be strongly convex");
}

const Vec& Instance::past(int t) const {
  // past(0) = y_0, past(-1) = y_{-1}, …
  const int idx = -t;
  require(idx >= 0 && idx < static_cast<int>(prehistory.size()),
          "Instance: prehistory index out of range");
  return prehistory[idx];
}

// --------------------------- Cost evaluation -------------------------------

double evaluate_hitting(const HittingCost& cost, const Vec& y) {
  return cost.value(y);
}

double evaluate_switching(const SwitchingCost& sw, const std::vector<Vec>& window) {
  if (static_cast<int>(window.size()) != sw.memory() + 1)
    throw std::invalid_argument("evaluate_switching: window must hold p+1 vectors");
  std::vector<Vec> mem(window.begin() + 1, window.end());
  return 0.5 * (window.front() - sw.delta(mem)).squaredNorm();
}

std::vector<Vec> memory_window(const Instance& inst, const std::vector<Vec>& decisions, int t) {
  const int p = inst.switching.memory();
  std::vector<Vec> mem;
  mem.reserve(p);
  for (int i = 1; i <= p; ++i) {
    const int s = t - i;
    if (s >= 1) {
      mem.push_back(decisions.at(s - 1));
    } else {
      mem.push_back(inst.past(s));
    }
  }
  return mem;
}

CostReport evaluate_total(const Instance& inst, const Trajectory& traj) {
  if (traj.length() != inst.T)
    throw std::invalid_argument("evaluate_total: trajectory length must equal the horizon");
  for (const Vec& y : traj.points)
    if (y.size() != inst.d || !y.allFinite())
      throw std::invalid_argument("evaluate_total: trajectory points must be finite d-vectors");
  CostReport report;
  report.hitting.resize(inst.T);
  report.switching.resize(inst.T);
  for (int t = 1; t <= inst.T; ++t) {
    const Vec& y = traj.points[t - 1];
    report.hitting[t - 1] = inst.cost(t).value(y);
    std::vector<Vec> mem = memory_window(inst, traj.points, t);
    report.switching[t - 1] = 0.5 * (y - inst.switching.delta(mem)).squaredNorm();
    report.total += report.hitting[t - 1] + report.switching[t - 1];
  }
  return report;
}

double competitive_ratio(const CostReport& alg, const CostReport& opt) {
  if (opt.total > 0) return alg.total / opt.total;
  if (alg.total > 0) return std::numeric_limits<double>::infinity();
  return 1.0;
}

Trajectory minimizer_trajectory(const Instance& inst) {
  Trajectory traj;
  traj.label = "minimizers";
  for (const HittingCost& c : inst.costs) traj.points.push_back(c.minimizer);
  return traj;
}

Trajectory rollout_trajectory(const Instance& inst) {
  Trajectory traj;
  traj.label = "rollout";
  for (int t = 1; t <= inst.T; ++t) {
    std::vector<Vec> mem = memory_window(inst, traj.points, t);
    traj.points.push_back(inst.switching.delta(mem));
  }
  return traj;
}

// --------------------------- Lipschitz audit -------------------------------

LipschitzReport validate_lipschitz(const SwitchingCost& sw,
                                   const std::vector<std::pair<double, double>>& box,
                                   int samples, uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("validate_lipschitz: samples must be >= 1");
  if (static_cast<int>(box.size()) != sw.dim())
    throw std::invalid_argument("validate_lipschitz: one interval per coordinate required");
  for (auto& [lo, hi] : box)
    if (!(lo < hi)) throw std::invalid_argument("validate_lipschitz: degenerate box");

  LipschitzReport report;
  report.slots.resize(sw.memory());
  const int d = sw.dim();
  const int p = sw.memory();

  if (sw.is_linear()) {
    // The per-slot supremum of a linear map is its spectral norm; report it
    // exactly rather than hoping a sampled pair aligns with the top
    // singular direction.
    for (int i = 0; i < p; ++i) {
      Eigen::JacobiSVD<Mat> svd(sw.linear_maps()[i]);
      report.slots[i].observed = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    }
  } else {
    Rng rng(seed);
    auto sample_point = [&] {
      Vec x(d);
      for (int c = 0; c < d; ++c) x[c] = rng.uniform(box[c].first, box[c].second);
      return x;
    };
    const double scales[] = {0.3, 1e-2, 1e-4};
    for (int s = 0; s < samples; ++s) {
      std::vector<Vec> mem(p);
      for (int i = 0; i < p; ++i) mem[i] = sample_point();
      for (int slot = 0; slot < p; ++slot) {
        const Vec a = mem[slot];
        for (double scale : scales) {
          Vec b = a + rng.normal_vec(d) * scale;
          for (int c = 0; c < d; ++c)
            b[c] = std::clamp(b[c], box[c].first, box[c].second);
          const double dist = (a - b).norm();
          if (dist < 1e-14) continue;
          std::vector<Vec> ma = mem, mb = mem;
          ma[slot] = a;
          mb[slot] = b;
          const double quot = (sw.delta(ma) - sw.delta(mb)).norm() / dist;
          report.slots[slot].observed = std::max(report.slots[slot].observed, quot);
        }
      }
    }
  }

  for (int i = 0; i < p; ++i) {
    report.slots[i].declared = sw.lipschitz(i);
    report.slots[i].exceeded =
        report.slots[i].observed > report.slots[i].declared * (1 + 1e-9) + 1e-12;
    if (report.slots[i].exceeded) report.ok = false;
  }
  return report;
}

}  // namespace irobd
