#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "llgs/analytic.hpp"
#include "llgs/errors.hpp"
#include "llgs/model.hpp"

namespace llgs {

using Vec3 = Eigen::Vector3d;

/// Magnetization line on a uniform grid of [-Lx, Lx], in the co-moving co-rotating frame.
struct LineState {
  double Lx = 100.0;
  std::vector<Vec3> m;
  double t = 0.0;
  double s_est = 0.0;
  double omega_est = 0.0;

  std::size_t size() const { return m.size(); }
  double dx() const { return 2.0 * Lx / double(m.size() - 1); }
  double x(std::size_t i) const { return -Lx + dx() * double(i); }
};

struct FreezeSeries {
  std::vector<double> times, s, omega;
  LineState terminal;
  double tail_q_amplitude = 0.0;  // peak-to-peak local wavenumber in the theta -> pi tail
  double max_norm_defect = 0.0;   // largest | |m|-1 | seen before renormalization
  double s_selected = 0.0, omega_selected = 0.0;
};

namespace detail {

// Neumann second difference / central first difference via mirrored ghost nodes
inline Vec3 second_diff(const std::vector<Vec3>& m, std::size_t i, double inv_dx2) {
  const std::size_t n = m.size();
  const Vec3& l = i == 0 ? m[1] : m[i - 1];
  const Vec3& r = i + 1 == n ? m[n - 2] : m[i + 1];
  return (l - 2.0 * m[i] + r) * inv_dx2;
}

inline Vec3 first_diff(const std::vector<Vec3>& m, std::size_t i, double inv_2dx) {
  const std::size_t n = m.size();
  if (i == 0 || i + 1 == n) return Vec3::Zero();
  return (m[i + 1] - m[i - 1]) * inv_2dx;
}

inline const Vec3 kE3(0.0, 0.0, 1.0);

// (1+a^2) m_t = R + a m x R with R = -m x h_eff + m x (m x J)
inline Vec3 llgs_point(const Vec3& m, const Vec3& mxx, const MaterialParams& mp) {
  const Vec3 heff = mxx + Vec3(0.0, 0.0, mp.h - mp.mu * m[2]);
  const Vec3 J = kE3 * (mp.beta / (1.0 + mp.c_cp * m[2]));
  const Vec3 R = -m.cross(heff) + m.cross(m.cross(J));
  return (R + mp.alpha * m.cross(R)) / (1.0 + mp.alpha * mp.alpha);
}

// Constant-coefficient tridiagonal solve of (I - r*Dxx) with Neumann ends, factored once.
class NeumannHeat {
 public:
  NeumannHeat(std::size_t n, double r) : r_(r), cp_(n), inv_(n) {
    const double d = 1.0 + 2.0 * r;
    double upper = -2.0 * r;  // first row mirrors its ghost
    inv_[0] = 1.0 / d;
    cp_[0] = upper * inv_[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double lower = i + 1 == n ? -2.0 * r : -r;
      const double denom = d - lower * cp_[i - 1];
      inv_[i] = 1.0 / denom;
      cp_[i] = -r * inv_[i];
    }
  }

  void solve(std::vector<Vec3>& b) const {
    const std::size_t n = b.size();
    b[0] *= inv_[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double lower = i + 1 == n ? -2.0 * r_ : -r_;
      b[i] = (b[i] - lower * b[i - 1]) * inv_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) b[i] -= cp_[i] * b[i + 1];
  }

 private:
  double r_;
  std::vector<double> cp_, inv_;
};

}  // namespace detail

/// Lab-frame time derivative of the discretized LLGS equation.
inline std::vector<Vec3> pde_rhs(const LineState& st, const MaterialParams& mp) {
  const double dx = st.dx();
  if (!(dx > 0.0)) throw DomainError("pde_rhs: grid spacing must be positive");
  const double inv_dx2 = 1.0 / (dx * dx);
  std::vector<Vec3> out(st.size());
  for (std::size_t i = 0; i < st.size(); ++i)
    out[i] = detail::llgs_point(st.m[i], detail::second_diff(st.m, i, inv_dx2), mp);
  return out;
}

/// pde_rhs plus the frame terms s m_x - omega e3 x m.
inline std::vector<Vec3> frame_rhs(const LineState& st, const MaterialParams& mp, double s, double omega) {
  auto out = pde_rhs(st, mp);
  const double inv_2dx = 0.5 / st.dx();
  for (std::size_t i = 0; i < st.size(); ++i)
    out[i] += s * detail::first_diff(st.m, i, inv_2dx) - omega * detail::kE3.cross(st.m[i]);
  return out;
}

inline double freeze_dt_max(double dx, double alpha) { return 0.4 * dx * dx * (1.0 + alpha * alpha); }

struct FreezeStepInfo {
  double norm_defect = 0.0;
};

/// One semi-implicit Euler step with speed and rotation phase conditions against `ref`.
/// With `frozen` set the frame is held fixed and no phase system is solved.
inline LineState freeze_step(const LineState& st, const MaterialParams& mp, double dt, const LineState& ref,
                             std::optional<std::pair<double, double>> frozen = std::nullopt,
                             FreezeStepInfo* info = nullptr, const detail::NeumannHeat* heat = nullptr) {
  const std::size_t n = st.size();
  if (n < 3 || ref.size() != n) throw DomainError("freeze_step: grid mismatch");
  const double dx = st.dx();
  if (dt <= 0.0 || dt > freeze_dt_max(dx, mp.alpha)) throw DomainError("freeze_step: dt exceeds the stability bound");
  const double D = 1.0 / (1.0 + mp.alpha * mp.alpha);
  const double inv_dx2 = 1.0 / (dx * dx), inv_2dx = 0.5 / dx;

  std::optional<detail::NeumannHeat> own;
  if (!heat) heat = &own.emplace(n, dt * D * inv_dx2);

  // update = a + s*b + omega*c, since the frame terms enter linearly
  std::vector<Vec3> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 mxx = detail::second_diff(st.m, i, inv_dx2);
    a[i] = st.m[i] + dt * (detail::llgs_point(st.m[i], mxx, mp) - D * mxx);
    b[i] = dt * detail::first_diff(st.m, i, inv_2dx);
    c[i] = -dt * detail::kE3.cross(st.m[i]);
  }
  heat->solve(a);
  heat->solve(b);
  heat->solve(c);

  double s, omega;
  if (frozen) {
    s = frozen->first;
    omega = frozen->second;
  } else {
    // <a + s b + omega c - ref, g_k> = 0 for g_1 = ref_x, g_2 = e3 x ref
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    Eigen::Vector2d r = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 g1 = detail::first_diff(ref.m, i, inv_2dx);
      const Vec3 g2 = detail::kE3.cross(ref.m[i]);
      G(0, 0) += b[i].dot(g1);
      G(0, 1) += c[i].dot(g1);
      G(1, 0) += b[i].dot(g2);
      G(1, 1) += c[i].dot(g2);
      r[0] -= (a[i] - ref.m[i]).dot(g1);
      r[1] -= (a[i] - ref.m[i]).dot(g2);
    }
    G *= dx;
    r *= dx;
    if (std::abs(G.determinant()) < 1e-12 * dt * dt) throw PhaseDegeneracy("freeze_step: phase Gram matrix is singular");
    const Eigen::Vector2d sol = G.partialPivLu().solve(r);
    s = sol[0];
    omega = sol[1];
  }

  LineState out = st;
  out.t = st.t + dt;
  out.s_est = s;
  out.omega_est = omega;
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 v = a[i] + s * b[i] + omega * c[i];
    const double nv = v.norm();
    if (!std::isfinite(nv) || nv == 0.0) throw BlowUp("freeze_step: non-finite magnetization");
    defect = std::max(defect, std::abs(nv - 1.0));
    out.m[i] = v / nv;
  }
  if (info) info->norm_defect = defect;
  return out;
}

/// Homogeneous wall (sigma = +1) blown down onto the grid, optionally perturbed.
inline LineState homogeneous_line(const MaterialParams& mp, double Lx, std::size_t n_nodes, double perturbation = 0.0,
                                  unsigned seed = 1) {
  LineState st;
  st.Lx = Lx;
  st.m.resize(n_nodes);
  const auto wf = homogeneous_speed_frequency(mp);
  st.s_est = wf.s;
  st.omega_est = wf.omega;
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const auto sp = blow_down(homogeneous_profile(st.x(i), mp.mu, 1), 0.0);
    Vec3 v(sp.m[0], sp.m[1], sp.m[2]);
    if (perturbation > 0.0) {
      const double env = std::sqrt(std::max(0.0, 1.0 - v[2] * v[2]));  // keep the poles fixed
      v += perturbation * env * Vec3(nd(gen), nd(gen), nd(gen));
      v.normalize();
    }
    st.m[i] = v;
  }
  return st;
}

/// Peak-to-peak local wavenumber over the tail where pi - theta lies in [lo, hi].
inline double tail_q_amplitude(const LineState& st, double lo = 1e-6, double hi = 0.2) {
  const double inv_2dx = 0.5 / st.dx();
  double qmin = INFINITY, qmax = -INFINITY;
  // only the part right of the wall centre
  std::size_t start = 0;
  while (start < st.size() && st.m[start][2] > 0.0) ++start;
  for (std::size_t i = std::max<std::size_t>(start, 1); i + 1 < st.size(); ++i) {
    const double gap = kPi - std::acos(std::clamp(st.m[i][2], -1.0, 1.0));
    if (gap < lo || gap > hi) continue;
    const Vec3 d = detail::first_diff(st.m, i, inv_2dx);
    const double q = local_wavenumber({st.m[i][0], st.m[i][1], st.m[i][2]}, {d[0], d[1], d[2]}, 0.0);
    qmin = std::min(qmin, q);
    qmax = std::max(qmax, q);
  }
  return qmax >= qmin ? qmax - qmin : 0.0;
}

struct FreezeOptions {
  double Lx = 100.0;
  std::size_t n_nodes = 4097;  // dx ~ 0.049; coarser grids visibly shift the pulled-front speed
  double dt = 1e-3;
  double T = 20.0;
  double window = 0.1;  // fraction of the series averaged for the selected values
  double perturbation = 0.0;
  unsigned seed = 1;
  std::optional<std::pair<double, double>> frozen;
};

inline FreezeSeries run_selection(const MaterialParams& mp, const LineState& init, const FreezeOptions& opt) {
  mp.validate();
  if (!(opt.T > 0.0) || !(opt.window > 0.0 && opt.window <= 1.0)) throw ConfigError("run_selection: bad T or window");
  const std::size_t steps = std::size_t(std::llround(opt.T / opt.dt));
  const double D = 1.0 / (1.0 + mp.alpha * mp.alpha);
  const detail::NeumannHeat heat(init.size(), opt.dt * D / (init.dx() * init.dx()));

  FreezeSeries fs;
  fs.times.reserve(steps);
  fs.s.reserve(steps);
  fs.omega.reserve(steps);
  LineState cur = init;
  FreezeStepInfo info;
  for (std::size_t k = 0; k < steps; ++k) {
    cur = freeze_step(cur, mp, opt.dt, cur, opt.frozen, &info, &heat);
    fs.max_norm_defect = std::max(fs.max_norm_defect, info.norm_defect);
    fs.times.push_back(cur.t);
    fs.s.push_back(cur.s_est);
    fs.omega.push_back(cur.omega_est);
  }
  const std::size_t k0 = steps - std::max<std::size_t>(1, std::size_t(double(steps) * opt.window));
  for (std::size_t k = k0; k < steps; ++k) {
    fs.s_selected += fs.s[k];
    fs.omega_selected += fs.omega[k];
  }
  fs.s_selected /= double(steps - k0);
  fs.omega_selected /= double(steps - k0);
  fs.tail_q_amplitude = tail_q_amplitude(cur);
  fs.terminal = std::move(cur);
  return fs;
}

inline FreezeSeries run_selection(const MaterialParams& mp, const FreezeOptions& opt = {}) {
  return run_selection(mp, homogeneous_line(mp, opt.Lx, opt.n_nodes, opt.perturbation, opt.seed), opt);
}

}  // namespace llgs
