#pragma once

// First integrals on the blow-up charts in the center case, the quadratic
// energy-gap expansion about the center point, and the leading tail oscillation.

#include <cmath>

#include <Eigen/Core>

#include "llgs/analytic.hpp"
#include "llgs/classification.hpp"
#include "llgs/errors.hpp"
#include "llgs/model.hpp"
#include "llgs/profile.hpp"

namespace llgs {

/// Omega making the chart equilibria centers: beta-/alpha + s^2/2 on theta = pi,
/// beta+/alpha - s^2/2 on theta = 0.
inline double center_frequency(const ChartId& chart, const MaterialParams& mp, double s) {
  switch (chart.kind) {
    case ChartId::Kind::Pi: return mp.beta_minus() / mp.alpha + s * s / 2.0;
    case ChartId::Kind::Zero: return mp.beta_plus() / mp.alpha - s * s / 2.0;
    default: throw DomainError("center_frequency: chart must be Zero or Pi");
  }
}

inline bool center_condition_holds(const ChartId& chart, const MaterialParams& mp, const WaveFrame& wf,
                                   double tol = 1e-10) {
  return std::abs(wf.omega - center_frequency(chart, mp, wf.s)) <= tol;
}

/// Chart Hamiltonian; conserved by the chart flow when the chart's center condition holds.
/// If `center_violated` is given it receives whether that condition fails (not an error).
inline double hamiltonian(const ChartId& chart, double p, double q, const MaterialParams& mp, const WaveFrame& wf,
                          bool* center_violated = nullptr) {
  constexpr double kLineGuard = 1e-12;
  const double s = wf.s;
  const double a = mp.alpha;
  if (center_violated) *center_violated = !center_condition_holds(chart, mp, wf);
  if (chart.kind == ChartId::Kind::Zero) {
    const double den = q + s / 2.0;
    if (std::abs(den) < kLineGuard) throw InvariantLine("hamiltonian: q on the invariant line q = -s/2");
    return -(p * p + q * q + a * s * p + s * q - mp.h + mp.beta_plus() / a + mp.mu) / den;
  }
  if (chart.kind == ChartId::Kind::Pi) {
    const double den = q - s / 2.0;
    if (std::abs(den) < kLineGuard) throw InvariantLine("hamiltonian: q on the invariant line q = s/2");
    return (p * p + q * q - a * s * p - s * q + mp.h - mp.beta_minus() / a + mp.mu) / den;
  }
  throw DomainError("hamiltonian: chart must be Zero or Pi");
}

/// d H / d(p, q) on the given chart.
inline Eigen::Vector2d hamiltonian_gradient(const ChartId& chart, double p, double q, const MaterialParams& mp,
                                            const WaveFrame& wf) {
  const double s = wf.s;
  const double a = mp.alpha;
  const double H = hamiltonian(chart, p, q, mp, wf);
  if (chart.kind == ChartId::Kind::Zero) {
    const double den = q + s / 2.0;
    return {-(2.0 * p + a * s) / den, -(2.0 * q + s) / den - H / den};
  }
  const double den = q - s / 2.0;
  return {(2.0 * p - a * s) / den, (2.0 * q - s) / den - H / den};
}

/// Whether the center is surrounded by periodic orbits (real, nonzero gamma).
inline bool periodic_neighborhood(const ChartId& chart, const MaterialParams& mp, const WaveFrame& wf) {
  const double s2 = wf.s * wf.s;
  const double a2 = mp.alpha * mp.alpha;
  switch (chart.kind) {
    case ChartId::Kind::Zero: return wf.omega > mp.h - mp.mu + s2 / 4.0 * (a2 - 1.0);
    case ChartId::Kind::Pi: return wf.omega < mp.h + mp.mu + s2 / 4.0 * (1.0 - a2);
    default: throw DomainError("periodic_neighborhood: chart must be Zero or Pi");
  }
}

/// a_ss ds^2 + a_sh ds dh + a_hh dh^2.
struct QuadraticForm2 {
  double a_ss = 0.0;
  double a_sh = 0.0;
  double a_hh = 0.0;

  double operator()(double ds, double dh) const { return a_ss * ds * ds + a_sh * ds * dh + a_hh * dh * dh; }

  bool negative_definite() const { return a_ss < 0.0 && 4.0 * a_ss * a_hh - a_sh * a_sh > 0.0; }

  /// Coefficients in absolute (s, h) about (s0, h0):
  /// {1, s, s^2, h, h^2, h s}.
  std::array<double, 6> expand_about(double s0, double h0) const {
    return {a_ss * s0 * s0 + a_sh * s0 * h0 + a_hh * h0 * h0,
            -2.0 * a_ss * s0 - a_sh * h0,
            a_ss,
            -a_sh * s0 - 2.0 * a_hh * h0,
            a_hh,
            a_sh};
  }
};

inline double rho(double alpha) { return std::exp(kPi / alpha) - std::exp(-kPi / alpha); }

/// Second-order energy gap about the center point; beta only enters through (s0, h0).
inline QuadraticForm2 htilde_quadratic(double alpha, double /*beta*/, double mu) {
  if (!(alpha > 0.0) || !(mu < 0.0)) throw DomainError("htilde_quadratic: need alpha > 0 and mu < 0");
  const double r = std::sqrt(-mu);
  const double rh = rho(alpha);
  const double pr = kPi * kPi / (rh * rh);
  const double a2 = 1.0 + alpha * alpha;
  QuadraticForm2 f;
  f.a_ss = -a2 * a2 * (4.0 + alpha * alpha) * pr / (alpha * alpha * alpha * r);
  f.a_sh = -2.0 * a2 * (2.0 + alpha * alpha) * pr / (alpha * alpha * mu);
  f.a_hh = a2 * pr / (alpha * mu * r);
  return f;
}

/// Rows p, q; columns: cosine and sine amplitude of the leading tail oscillation.
inline Eigen::Matrix2d tail_oscillation_coefficients(double ds, double dh, double alpha, double mu) {
  const double r = std::sqrt(-mu);
  const double k = kPi / rho(alpha);
  const double a = -dh / (alpha * r) + 2.0 * ds / (alpha * alpha);
  const double b = -dh / r + (3.0 + alpha * alpha) * ds / alpha;
  Eigen::Matrix2d m;
  m << k * a, k * b,  //
      -k * b, k * a;
  return m;
}

enum class Flatness { Flat, NonFlat, Undetermined };

inline std::string to_string(Flatness f) {
  switch (f) {
    case Flatness::Flat: return "flat";
    case Flatness::NonFlat: return "non-flat";
    default: return "undetermined";
  }
}

inline constexpr double kNonFlatGap = 1e-7;
inline constexpr double kFlatGap = 1e-9;

inline Flatness classify_gap(double htilde) {
  const double g = std::abs(htilde);
  if (g > kNonFlatGap) return Flatness::NonFlat;
  if (g < kFlatGap) return Flatness::Flat;
  return Flatness::Undetermined;
}

/// The theta = pi equilibrium continuing E^pi (the one with the smaller imaginary part).
inline cplx pi_target(const MaterialParams& mp, const WaveFrame& wf) {
  return chart_equilibria(ChartId::pi(), mp, wf).second.z;
}

/// H^pi at the far right of the profile minus H^pi at the target equilibrium.
inline double htilde_measured(const Profile& profile, const MaterialParams& mp, const WaveFrame& wf) {
  const ChartState& r = profile.right();
  if (std::abs(r.theta - kPi) > 1e-6) throw ChartMiss("htilde_measured: profile does not reach theta = pi");
  const cplx z = pi_target(mp, wf);
  return hamiltonian(ChartId::pi(), r.p, r.q, mp, wf) - hamiltonian(ChartId::pi(), z.real(), z.imag(), mp, wf);
}

}  // namespace llgs
