#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "llgs/collocation.hpp"
#include "llgs/continuation.hpp"
#include "llgs/errors.hpp"
#include "llgs/freezing.hpp"
#include "llgs/integrator.hpp"
#include "llgs/model.hpp"
#include "llgs/profile.hpp"

namespace llgs::io {

using json = nlohmann::ordered_json;

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Rejects any key of `j` outside `allowed`; `where` names the section in the message.
inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline MaterialParams material_from_json(const json& j) {
  require_keys(j, {"alpha", "beta", "mu", "h", "c_cp"}, "material");
  MaterialParams mp;
  mp.alpha = get_or(j, "alpha", mp.alpha, "material");
  mp.beta = get_or(j, "beta", mp.beta, "material");
  mp.mu = get_or(j, "mu", mp.mu, "material");
  mp.h = get_or(j, "h", mp.h, "material");
  mp.c_cp = get_or(j, "c_cp", mp.c_cp, "material");
  try {
    mp.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("material: ") + e.what());
  }
  return mp;
}

inline json to_json(const MaterialParams& mp) {
  return {{"alpha", mp.alpha}, {"beta", mp.beta}, {"mu", mp.mu}, {"h", mp.h}, {"c_cp", mp.c_cp}};
}

inline BvpConfig bvp_from_json(const json& j) {
  require_keys(j, {"L", "n_mesh", "collocation_order", "newton_tol", "max_newton"}, "bvp");
  BvpConfig c;
  c.L = get_or(j, "L", c.L, "bvp");
  c.n_mesh = get_or(j, "n_mesh", c.n_mesh, "bvp");
  c.collocation_order = get_or(j, "collocation_order", c.collocation_order, "bvp");
  c.newton_tol = get_or(j, "newton_tol", c.newton_tol, "bvp");
  c.max_newton = get_or(j, "max_newton", c.max_newton, "bvp");
  c.validate();
  return c;
}

inline StepPolicy policy_from_json(const json& j, const std::string& where) {
  StepPolicy p;
  p.initial = get_or(j, "initial_step", p.initial, where);
  p.min = get_or(j, "min_step", p.min, where);
  p.max = get_or(j, "max_step", p.max, where);
  p.max_points = get_or(j, "max_points", p.max_points, where);
  if (!(p.min > 0.0 && p.min <= p.initial && p.initial <= p.max)) throw ConfigError(where + ": need 0 < min_step <= initial_step <= max_step");
  return p;
}

inline FreezeOptions freeze_from_json(const json& j) {
  require_keys(j, {"Lx", "n_nodes", "dt", "T", "window", "perturbation", "seed"}, "freeze");
  FreezeOptions o;
  o.Lx = get_or(j, "Lx", o.Lx, "freeze");
  o.n_nodes = get_or(j, "n_nodes", o.n_nodes, "freeze");
  o.dt = get_or(j, "dt", o.dt, "freeze");
  o.T = get_or(j, "T", o.T, "freeze");
  o.window = get_or(j, "window", o.window, "freeze");
  o.perturbation = get_or(j, "perturbation", o.perturbation, "freeze");
  o.seed = get_or(j, "seed", o.seed, "freeze");
  if (!(o.Lx > 0.0) || o.n_nodes < 3 || !(o.dt > 0.0)) throw ConfigError("freeze: need Lx > 0, n_nodes >= 3, dt > 0");
  return o;
}

// ---- profiles

/// Azimuth obtained by integrating q from the left end (trapezoid rule).
inline std::vector<double> azimuth(const std::vector<double>& xi, const std::vector<double>& q) {
  std::vector<double> phi(xi.size(), 0.0);
  for (std::size_t i = 1; i < xi.size(); ++i) phi[i] = phi[i - 1] + 0.5 * (q[i] + q[i - 1]) * (xi[i] - xi[i - 1]);
  return phi;
}

inline std::string state_csv(const std::vector<double>& xi, const std::vector<ChartState>& st) {
  std::vector<double> q(st.size());
  for (std::size_t i = 0; i < st.size(); ++i) q[i] = st[i].q;
  const auto phi = azimuth(xi, q);
  std::ostringstream os;
  os << "xi,theta,p,q,m1,m2,m3\n";
  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto m = blow_down(st[i], phi[i]).m;
    os << fmt(xi[i]) << ',' << fmt(st[i].theta) << ',' << fmt(st[i].p) << ',' << fmt(st[i].q) << ',' << fmt(m[0])
       << ',' << fmt(m[1]) << ',' << fmt(m[2]) << '\n';
  }
  return os.str();
}

inline std::string profile_csv(const Profile& pr) { return state_csv(pr.mesh, pr.states); }

inline std::string trajectory_csv(const Trajectory& tr) {
  std::vector<ChartState> st(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) st[i] = tr.state(i);
  return state_csv(tr.xs, st);
}

inline json to_json(const Profile& pr) {
  json j;
  j["schema"] = "llgs.profile/1";
  j["material"] = to_json(pr.mp);
  j["frame"] = {{"s", pr.wf.s}, {"omega", pr.wf.omega}};
  j["regime"] = to_string(pr.regime);
  j["htilde"] = pr.htilde;
  std::vector<double> th, p, q;
  for (const auto& s : pr.states) {
    th.push_back(s.theta);
    p.push_back(s.p);
    q.push_back(s.q);
  }
  j["mesh"] = pr.mesh;
  j["theta"] = th;
  j["p"] = p;
  j["q"] = q;
  if (!pr.stage_slopes.empty()) {
    json ks = json::array();
    for (const auto& k : pr.stage_slopes) ks.push_back({k[0], k[1], k[2]});
    j["stage_slopes"] = ks;
  }
  return j;
}

inline RegimeKind regime_from_string(const std::string& s) {
  if (s == "codim2") return RegimeKind::Codim2;
  if (s == "center") return RegimeKind::Center;
  if (s == "codim0") return RegimeKind::Codim0;
  throw ConfigError("unknown regime '" + s + "'");
}

inline Profile profile_from_json(const json& j) {
  require_keys(j, {"schema", "material", "frame", "regime", "htilde", "mesh", "theta", "p", "q", "stage_slopes"}, "profile");
  if (j.value("schema", "") != "llgs.profile/1") throw ConfigError("profile: unsupported schema");
  Profile pr;
  try {
    pr.mp = material_from_json(j.at("material"));
    pr.wf = {j.at("frame").at("s").get<double>(), j.at("frame").at("omega").get<double>()};
    pr.regime = regime_from_string(j.at("regime").get<std::string>());
    pr.htilde = j.value("htilde", 0.0);
    pr.mesh = j.at("mesh").get<std::vector<double>>();
    const auto th = j.at("theta").get<std::vector<double>>();
    const auto p = j.at("p").get<std::vector<double>>();
    const auto q = j.at("q").get<std::vector<double>>();
    if (th.size() != pr.mesh.size() || p.size() != pr.mesh.size() || q.size() != pr.mesh.size())
      throw ConfigError("profile: column lengths differ");
    for (std::size_t i = 0; i < th.size(); ++i) pr.states.push_back({th[i], p[i], q[i]});
    if (j.contains("stage_slopes"))
      for (const auto& k : j.at("stage_slopes")) pr.stage_slopes.emplace_back(k.at(0).get<double>(), k.at(1).get<double>(), k.at(2).get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  return pr;
}

/// Chart coordinates of a PDE line; p and q are carried over from the nearest resolvable node near the poles.
inline Profile line_to_profile(const LineState& st, const MaterialParams& mp) {
  Profile pr;
  pr.mp = mp;
  pr.wf = {st.s_est, st.omega_est};
  const std::size_t n = st.size();
  const double dx = st.dx();
  pr.mesh.resize(n);
  pr.states.resize(n);
  double p_last = 0.0, q_last = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pr.mesh[i] = st.x(i);
    const Vec3& m = st.m[i];
    const double theta = std::acos(std::clamp(m[2], -1.0, 1.0));
    const double sn = std::hypot(m[0], m[1]);
    if (i > 0 && i + 1 < n && sn > 1e-8) {
      const Vec3 d = (st.m[i + 1] - st.m[i - 1]) / (2.0 * dx);
      p_last = -d[2] / (sn * sn);  // theta' = -m3' / sin(theta)
      q_last = (m[0] * d[1] - m[1] * d[0]) / (sn * sn);
    }
    pr.states[i] = {theta, p_last, q_last};
  }
  return pr;
}

// ---- branches and series

inline json to_json(const Branch& br) {
  json j;
  j["schema"] = "llgs.branch/1";
  j["parameter"] = to_string(br.parameter);
  json fr = json::array();
  for (Param p : br.free) fr.push_back(to_string(p));
  j["free"] = fr;
  j["terminated"] = to_string(br.terminated);
  json pts = json::array();
  for (const auto& pt : br.points)
    pts.push_back({{"lambda", pt.lambda},
                   {"c_cp", pt.params.mp.c_cp},
                   {"h", pt.params.mp.h},
                   {"s", pt.params.wf.s},
                   {"omega", pt.params.wf.omega},
                   {"htilde", pt.params.htilde},
                   {"step", pt.step},
                   {"newton_iterations", pt.newton_iterations},
                   {"residual", pt.residual},
                   {"tail_amplitude", pt.tail_amplitude}});
  j["points"] = pts;
  return j;
}

inline std::string series_csv(const FreezeSeries& fs) {
  std::ostringstream os;
  os << "t,s,omega\n";
  for (std::size_t k = 0; k < fs.times.size(); ++k) os << fmt(fs.times[k]) << ',' << fmt(fs.s[k]) << ',' << fmt(fs.omega[k]) << '\n';
  return os.str();
}

inline std::string line_csv(const LineState& st) {
  std::ostringstream os;
  os << "x,m1,m2,m3\n";
  for (std::size_t i = 0; i < st.size(); ++i)
    os << fmt(st.x(i)) << ',' << fmt(st.m[i][0]) << ',' << fmt(st.m[i][1]) << ',' << fmt(st.m[i][2]) << '\n';
  return os.str();
}

// ---- files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace llgs::io
