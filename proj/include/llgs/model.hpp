#pragma once

// Parameters, state representations and the right-hand sides of the
// coherent-structure ODE for domain walls of the LLGS equation.

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Core>

#include "llgs/errors.hpp"

namespace llgs {

inline constexpr double kPi = std::numbers::pi;

/// Material and drive constants of the nanowire.
///
/// alpha: Gilbert damping, beta: spin-transfer strength, mu: anisotropy
/// (mu < 0 is the easy-axis nanowire case), h: applied field along e3,
/// c_cp: polarization ratio in (-1, 1).
struct MaterialParams {
  double alpha = 0.5;
  double beta = 0.1;
  double mu = -1.0;
  double h = 0.5;
  double c_cp = 0.0;

  /// beta / (1 + c_cp): effective spin-transfer at theta = 0.
  double beta_plus() const { return beta / (1.0 + c_cp); }
  /// beta / (1 - c_cp): effective spin-transfer at theta = pi.
  double beta_minus() const { return beta / (1.0 - c_cp); }

  void validate() const {
    auto fail = [](const std::string& what) { throw DomainError("MaterialParams: " + what); };
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(mu) || !std::isfinite(h) ||
        !std::isfinite(c_cp))
      fail("all fields must be finite");
    if (!(alpha > 0.0)) fail("alpha must be > 0");
    if (!(beta >= 0.0)) fail("beta must be >= 0");
    if (!(std::abs(c_cp) < 1.0)) fail("c_cp must lie in (-1, 1)");
  }

  MaterialParams with_h(double value) const {
    MaterialParams out = *this;
    out.h = value;
    return out;
  }
  MaterialParams with_c_cp(double value) const {
    MaterialParams out = *this;
    out.c_cp = value;
    return out;
  }
};

/// Speed and rotation frequency of a relative equilibrium.
struct WaveFrame {
  double s = 0.0;
  double omega = 0.0;
};

/// Point of the desingularized system: altitude theta, p = theta' / sin(theta), wavenumber q.
struct ChartState {
  double theta = 0.0;
  double p = 0.0;
  double q = 0.0;
};

/// Point of the singular system (theta, psi = theta', q).
struct SingularState {
  double theta = 0.0;
  double psi = 0.0;
  double q = 0.0;
};

struct SphereState {
  std::array<double, 3> m{0.0, 0.0, 1.0};
  double q = 0.0;
};

/// sin(theta) guard below which the singular system refuses to evaluate.
inline constexpr double kSingularGuard = 1e-8;
/// Guard on 1 - m3^2 for the local wavenumber formula.
inline constexpr double kPoleGuard = 1e-14;

inline void validate_theta(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    std::ostringstream os;
    os << "theta = " << theta << " outside [0, pi]";
    throw DomainError(os.str());
  }
}

namespace detail {

// Unchecked evaluation used inside the solvers, where iterates may sit a
// rounding error outside [0, pi].
inline Eigen::Vector3d rhs(const Eigen::Vector3d& u, const MaterialParams& mp, const WaveFrame& wf) {
  const double st = std::sin(u[0]);
  const double ct = std::cos(u[0]);
  const double p = u[1];
  const double q = u[2];
  const double s = wf.s;
  Eigen::Vector3d out;
  out[0] = st * p;
  out[1] = mp.h - wf.omega - mp.alpha * s * p + s * q - (p * p - q * q + mp.mu) * ct;
  out[2] = mp.alpha * wf.omega - mp.beta / (1.0 + mp.c_cp * ct) - s * p - mp.alpha * s * q -
           2.0 * p * q * ct;
  return out;
}

// d rhs / d(theta, p, q)
inline Eigen::Matrix3d rhs_jacobian(const Eigen::Vector3d& u, const MaterialParams& mp,
                                    const WaveFrame& wf) {
  const double st = std::sin(u[0]);
  const double ct = std::cos(u[0]);
  const double p = u[1];
  const double q = u[2];
  const double s = wf.s;
  const double a = mp.alpha;
  const double den = 1.0 + mp.c_cp * ct;
  Eigen::Matrix3d J;
  J << ct * p, st, 0.0,                                                          //
      st * (p * p - q * q + mp.mu), -a * s - 2.0 * p * ct, s + 2.0 * q * ct,      //
      -mp.beta * mp.c_cp * st / (den * den) + 2.0 * p * q * st, -s - 2.0 * q * ct,
      -a * s - 2.0 * p * ct;
  return J;
}

// d rhs / d(c_cp, s, omega, h)
inline Eigen::Matrix<double, 3, 4> rhs_param_jacobian(const Eigen::Vector3d& u, const MaterialParams& mp,
                                                      const WaveFrame& /*wf*/) {
  const double ct = std::cos(u[0]);
  const double p = u[1];
  const double q = u[2];
  const double den = 1.0 + mp.c_cp * ct;
  Eigen::Matrix<double, 3, 4> P;
  P << 0.0, 0.0, 0.0, 0.0,                                   //
      0.0, -mp.alpha * p + q, -1.0, 1.0,                      //
      mp.beta * ct / (den * den), -p - mp.alpha * q, mp.alpha, 0.0;
  return P;
}

}  // namespace detail

/// Right-hand side of the desingularized system on the cylinder (theta, p, q).
inline ChartState desingularized_rhs(const ChartState& state, const MaterialParams& mp, const WaveFrame& wf) {
  validate_theta(state.theta);
  const Eigen::Vector3d d = detail::rhs(Eigen::Vector3d(state.theta, state.p, state.q), mp, wf);
  return {d[0], d[1], d[2]};
}

/// Right-hand side of the original first-order system; only valid away from the poles.
inline SingularState singular_rhs(const SingularState& state, const MaterialParams& mp, const WaveFrame& wf,
                                  double guard = kSingularGuard) {
  const double st = std::sin(state.theta);
  if (!(state.theta > 0.0 && state.theta < kPi) || std::abs(st) < guard)
    throw SingularEvaluation("singular_rhs: |sin(theta)| below guard; use desingularized_rhs");
  const double ct = std::cos(state.theta);
  const double s = wf.s;
  const double q = state.q;
  SingularState out;
  out.theta = state.psi;
  out.psi = st * (mp.h - wf.omega + s * q + (q * q - mp.mu) * ct) - mp.alpha * s * state.psi;
  out.q = mp.alpha * wf.omega - mp.beta / (1.0 + mp.c_cp * ct) - mp.alpha * s * q -
          (s + 2.0 * q * ct) * state.psi / st;
  return out;
}

inline SingularState to_singular(const ChartState& c) { return {c.theta, c.p * std::sin(c.theta), c.q}; }

/// Blow-down to the sphere at azimuth phi; theta = 0 and theta = pi collapse to +e3 and -e3.
inline SphereState blow_down(const ChartState& state, double phi) {
  SphereState out;
  const double st = std::sin(state.theta);
  out.m = {std::cos(phi) * st, std::sin(phi) * st, std::cos(state.theta)};
  if (state.theta == 0.0) out.m = {0.0, 0.0, 1.0};
  if (state.theta == kPi) out.m = {0.0, 0.0, -1.0};
  out.q = state.q;
  return out;
}

/// q = <(m1', m2'), (-m2, m1)> / (1 - m3^2).
inline double local_wavenumber(const std::array<double, 3>& m, const std::array<double, 3>& m_prime,
                               double guard = kPoleGuard) {
  const double denom = 1.0 - m[2] * m[2];
  if (denom < guard) throw PoleEvaluation("local_wavenumber: magnetization too close to a pole");
  return (-m_prime[0] * m[1] + m_prime[1] * m[0]) / denom;
}

}  // namespace llgs
