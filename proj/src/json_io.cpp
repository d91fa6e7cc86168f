#include "irobd/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace irobd {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string fmt_vec(const Vec& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::string fmt_mat(const Mat& m) {
  std::string out = "[";
  for (int r = 0; r < m.rows(); ++r) {
    if (r) out += ",";
    out += fmt_vec(m.row(r).transpose());
  }
  return out + "]";
}

Vec parse_vec(const json& j, int expect_dim = -1) {
  require(j.is_array(), "json: expected an array of numbers");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  require(expect_dim < 0 || v.size() == expect_dim, "json: vector dimension mismatch");
  return v;
}

Mat parse_mat(const json& j) {
  require(j.is_array() && !j.empty(), "json: expected a matrix");
  const size_t cols = j[0].size();
  Mat m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    require(j[r].is_array() && j[r].size() == cols, "json: ragged matrix");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// --------------------------- Instance ---------------------------------------

std::string to_json(const Instance& inst) {
  std::string sw;
  switch (inst.switching.kind()) {
    case SwitchingCost::Kind::Linear: {
      sw = "{\"kind\":\"linear\",\"C\":[";
      const auto& maps = inst.switching.linear_maps();
      for (size_t i = 0; i < maps.size(); ++i) {
        if (i) sw += ",";
        sw += fmt_mat(maps[i]);
      }
      sw += "]}";
      break;
    }
    case SwitchingCost::Kind::AffineDrone:
      sw = "{\"kind\":\"drone\",\"C1\":" + format_double(inst.switching.drone_c1()) +
           ",\"C2\":" + format_double(inst.switching.drone_c2()) +
           ",\"box\":" + format_double(inst.switching.drone_box()) + "}";
      break;
    case SwitchingCost::Kind::PlateauSine:
      sw = "{\"kind\":\"remark2\",\"eps\":" + format_double(inst.switching.sine_eps()) +
           ",\"gamma\":" + format_double(inst.switching.sine_gamma()) +
           ",\"n\":" + std::to_string(inst.switching.sine_n()) +
           ",\"scale\":" + format_double(inst.switching.sine_scale()) + "}";
      break;
    case SwitchingCost::Kind::Callback:
      throw std::invalid_argument("to_json: callback switching costs have no file form");
  }

  std::string out = "{\"T\":" + std::to_string(inst.T) + ",\"d\":" + std::to_string(inst.d) +
                    ",\"k\":" + std::to_string(inst.k) + ",\"prehistory\":[";
  for (size_t i = 0; i < inst.prehistory.size(); ++i) {
    if (i) out += ",";
    out += fmt_vec(inst.prehistory[i]);
  }
  out += "],\"switching\":" + sw + ",\"costs\":[";
  for (int t = 0; t < inst.T; ++t) {
    if (t) out += ",";
    const HittingCost& c = inst.costs[t];
    if (c.geometry.is_isotropic()) {
      out += "{\"m\":" + format_double(c.geometry.iso());
    } else {
      out += "{\"Q\":" + fmt_mat(c.geometry.matrix());
    }
    out += ",\"v\":" + fmt_vec(c.minimizer) + "}";
  }
  out += "]}";
  return out;
}

Instance instance_from_json(const std::string& text) {
  json j = json::parse(text);
  Instance inst;
  inst.T = j.at("T").get<int>();
  inst.d = j.at("d").get<int>();
  inst.k = j.at("k").get<int>();

  const json& sw = j.at("switching");
  const std::string kind = sw.at("kind").get<std::string>();
  if (kind == "linear") {
    std::vector<Mat> maps;
    for (const json& c : sw.at("C")) maps.push_back(parse_mat(c));
    inst.switching = SwitchingCost::linear(std::move(maps));
  } else if (kind == "drone") {
    inst.switching = SwitchingCost::affine_drone(sw.at("C1").get<double>(),
                                                 sw.at("C2").get<double>(),
                                                 sw.at("box").get<double>());
  } else if (kind == "remark2") {
    inst.switching = SwitchingCost::plateau_sine(sw.at("eps").get<double>(),
                                                 sw.at("gamma").get<double>(),
                                                 sw.at("n").get<int>(),
                                                 sw.value("scale", 1.0));
  } else {
    throw std::invalid_argument("instance_from_json: unknown switching kind '" + kind + "'");
  }

  if (j.contains("prehistory")) {
    for (const json& y : j.at("prehistory")) inst.prehistory.push_back(parse_vec(y, inst.d));
  }

  for (const json& c : j.at("costs")) {
    HittingCost cost;
    if (c.contains("m")) {
      cost.geometry = Quadratic::isotropic(inst.d, c.at("m").get<double>());
    } else {
      cost.geometry = Quadratic::dense(parse_mat(c.at("Q")));
    }
    cost.minimizer = parse_vec(c.at("v"), inst.d);
    inst.costs.push_back(std::move(cost));
  }
  inst.finalize();
  return inst;
}

std::string to_json(const Trajectory& traj, const CostReport* report) {
  std::string out = "{\"label\":\"" + traj.label + "\",\"points\":[";
  for (int t = 0; t < traj.length(); ++t) {
    if (t) out += ",";
    out += fmt_vec(traj.points[t]);
  }
  out += "]";
  if (report) {
    out += ",\"hitting\":[";
    for (size_t i = 0; i < report->hitting.size(); ++i) {
      if (i) out += ",";
      out += format_double(report->hitting[i]);
    }
    out += "],\"switching\":[";
    for (size_t i = 0; i < report->switching.size(); ++i) {
      if (i) out += ",";
      out += format_double(report->switching[i]);
    }
    out += "],\"total\":" + format_double(report->total);
  }
  return out + "}";
}

// --------------------------- Control systems --------------------------------

std::string to_json(const LinearControlSystem& sys) {
  std::string out = "{\"kind\":\"linear\",\"A\":" + fmt_mat(sys.A) + ",\"B\":" + fmt_mat(sys.B) +
                    ",\"q\":[";
  for (size_t i = 0; i < sys.q.size(); ++i) {
    if (i) out += ",";
    out += format_double(sys.q[i]);
  }
  out += "],\"w\":[";
  for (size_t i = 0; i < sys.w.size(); ++i) {
    if (i) out += ",";
    out += fmt_vec(sys.w[i]);
  }
  out += "],\"x0\":" + fmt_vec(sys.x0) + "}";
  return out;
}

std::string system_kind_from_json(const std::string& text) {
  return json::parse(text).at("kind").get<std::string>();
}

LinearControlSystem linear_system_from_json(const std::string& text) {
  json j = json::parse(text);
  require(j.at("kind") == "linear", "linear_system_from_json: kind must be 'linear'");
  LinearControlSystem sys;
  sys.A = parse_mat(j.at("A"));
  sys.B = parse_mat(j.at("B"));
  for (const json& q : j.at("q")) sys.q.push_back(q.get<double>());
  for (const json& w : j.at("w")) sys.w.push_back(parse_vec(w, sys.n()));
  sys.x0 = j.contains("x0") ? parse_vec(j.at("x0"), sys.n()) : Vec(Vec::Zero(sys.n()));
  return sys;
}

NonlinearControlSystem nonlinear_system_from_json(const std::string& text) {
  json j = json::parse(text);
  require(j.at("kind") == "nonlinear", "nonlinear_system_from_json: kind must be 'nonlinear'");
  NonlinearControlSystem sys;
  sys.A = parse_mat(j.at("A"));
  const int n = sys.n();

  const json& g = j.at("g");
  const std::string gk = g.at("kind").get<std::string>();
  double default_l;
  if (gk == "zero") {
    sys.g = [n](const Vec&) { return Vec(Vec::Zero(n)); };
    sys.g_jacobian = [n](const Vec&) { return Mat(Mat::Zero(n, n)); };
    default_l = sys.A.norm();
  } else if (gk == "drone") {
    require(n == 1, "nonlinear_system_from_json: drone dynamics are 1-D");
    const double c1 = g.at("C1").get<double>(), c2 = g.at("C2").get<double>();
    sys.g = [c1, c2](const Vec& x) {
      Vec out(1);
      out[0] = -(c1 + c2 * std::abs(x[0]) * x[0]);
      return out;
    };
    sys.g_jacobian = [c2](const Vec& x) {
      Mat jac(1, 1);
      jac(0, 0) = -2.0 * c2 * std::abs(x[0]);
      return jac;
    };
    default_l = std::abs(sys.A(0, 0)) + 2.0 * c2 * 8.0;  // default operating box |x| <= 8
  } else if (gk == "sine") {
    const double amp = g.at("amp").get<double>(), freq = g.at("freq").get<double>();
    sys.g = [amp, freq, n](const Vec& x) {
      Vec out(n);
      for (int i = 0; i < n; ++i) out[i] = amp * std::sin(freq * x[i]);
      return out;
    };
    sys.g_jacobian = [amp, freq, n](const Vec& x) {
      Mat jac = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) jac(i, i) = amp * freq * std::cos(freq * x[i]);
      return jac;
    };
    default_l = sys.A.norm() + std::abs(amp * freq);
  } else {
    throw std::invalid_argument("nonlinear_system_from_json: unknown g kind '" + gk + "'");
  }
  sys.lipschitz = j.value("L", default_l);

  for (const json& q : j.at("Q")) sys.Q.push_back(parse_mat(q));
  for (const json& v : j.at("v")) sys.targets.push_back(parse_vec(v, n));
  sys.delay = j.at("delay").get<int>();
  sys.x0 = j.contains("x0") ? parse_vec(j.at("x0"), n) : Vec(Vec::Zero(n));
  return sys;
}

}  // namespace irobd
