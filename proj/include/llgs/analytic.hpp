#pragma once

// Closed-form dynamics on the blow-up charts and the explicit homogeneous wall family.
//
// With theta frozen, the (p, q) subsystem is the complex Riccati equation
//   z' = A z^2 + B z + C,   z = p + i q,
// with A = -cos(theta), B = -(alpha + i) s and
// C = h - Omega + A mu + i (alpha Omega - beta / (1 - A c_cp)).

#include <array>
#include <cmath>
#include <complex>
#include <utility>

#include "llgs/errors.hpp"
#include "llgs/model.hpp"

namespace llgs {

using cplx = std::complex<double>;

/// Which theta-fiber of the cylinder: the two invariant charts or an artificially frozen theta.
struct ChartId {
  enum class Kind { Zero, Pi, Fixed };
  Kind kind = Kind::Zero;
  double theta = 0.0;  // only read for Fixed

  static ChartId zero() { return {Kind::Zero, 0.0}; }
  static ChartId pi() { return {Kind::Pi, kPi}; }
  static ChartId fixed(double theta) {
    if (!(theta > 0.0 && theta < kPi)) throw DomainError("ChartId::fixed requires theta in (0, pi)");
    return {Kind::Fixed, theta};
  }

  double angle() const {
    switch (kind) {
      case Kind::Zero: return 0.0;
      case Kind::Pi: return kPi;
      default: return theta;
    }
  }
  /// A = -cos(theta), exact on the two charts.
  double A() const {
    switch (kind) {
      case Kind::Zero: return -1.0;
      case Kind::Pi: return 1.0;
      default: {
        // snap the rounding residue of cos(pi/2) so the linear branch of chart_flow is taken
        const double c = std::cos(theta);
        return std::abs(c) < 1e-15 ? 0.0 : -c;
      }
    }
  }
};

struct ChartCoefficients {
  double A = 0.0;
  cplx B;
  cplx C;
  cplx gamma;  // sqrt(4 A C - B^2), principal branch

  cplx field(cplx z) const { return (A * z + B) * z + C; }
};

/// Principal square root with the tie rule Re = 0 -> Im >= 0.
inline cplx principal_sqrt(cplx w) {
  cplx r = std::sqrt(w);
  if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
  return r;
}

inline ChartCoefficients chart_coefficients(const ChartId& chart, const MaterialParams& mp, const WaveFrame& wf) {
  ChartCoefficients c;
  c.A = chart.A();
  c.B = -cplx(mp.alpha, 1.0) * wf.s;
  c.C = cplx(mp.h - wf.omega + c.A * mp.mu, mp.alpha * wf.omega - mp.beta / (1.0 - c.A * mp.c_cp));
  c.gamma = principal_sqrt(4.0 * c.A * c.C - c.B * c.B);
  return c;
}

/// Equilibrium on a chart, with its spatial eigenvalues (two in-chart, one transverse).
struct ChartEquilibrium {
  ChartId chart;
  int sigma = 1;  // +1 or -1
  cplx z;
  std::array<cplx, 3> eigenvalues;

  ChartState state() const { return {chart.angle(), z.real(), z.imag()}; }
};

/// The two equilibria (sigma = +, sigma = -) on the chart theta = 0 or theta = pi.
///
/// In-chart eigenvalues are the derivative of the complex field at the
/// equilibrium and its conjugate; the transverse eigenvalue is d(sin(theta) p)/d(theta).
inline std::pair<ChartEquilibrium, ChartEquilibrium> chart_equilibria(const ChartId& chart, const MaterialParams& mp,
                                                                      const WaveFrame& wf) {
  if (chart.kind == ChartId::Kind::Fixed) throw DomainError("chart_equilibria: only the charts theta = 0, pi");
  const ChartCoefficients c = chart_coefficients(chart, mp, wf);
  const cplx I(0.0, 1.0);
  auto make = [&](int sigma) {
    ChartEquilibrium e;
    e.chart = chart;
    e.sigma = sigma;
    if (chart.kind == ChartId::Kind::Zero) {
      e.z = 0.5 * (c.B - double(sigma) * I * c.gamma);
      e.eigenvalues[0] = double(sigma) * I * c.gamma;
      e.eigenvalues[2] = e.z.real();
    } else {
      e.z = 0.5 * (-c.B + double(sigma) * I * c.gamma);
      e.eigenvalues[0] = double(sigma) * I * c.gamma;
      e.eigenvalues[2] = -e.z.real();
    }
    e.eigenvalues[1] = std::conj(e.eigenvalues[0]);
    return e;
  };
  return {make(+1), make(-1)};
}

/// Exact solution of z' = A z^2 + B z + C through z(xi0) = z0, evaluated at xi.
inline cplx chart_flow(cplx z0, double xi0, double xi, const ChartCoefficients& c) {
  constexpr double kNearEquilibrium = 1e-12;
  constexpr double kPoleDistance = 1e-10;
  if (c.A == 0.0) {
    if (std::abs(c.B) == 0.0) return z0 + c.C * (xi - xi0);
    const cplx zeq = -c.C / c.B;
    if (std::abs(z0 - zeq) <= kNearEquilibrium) throw EquilibriumInput("chart_flow: initial point is the equilibrium");
    return (z0 - zeq) * std::exp(c.B * (xi - xi0)) + zeq;
  }
  const cplx I(0.0, 1.0);
  const cplx zp = (-c.B + I * c.gamma) / (2.0 * c.A);
  const cplx zm = (-c.B - I * c.gamma) / (2.0 * c.A);
  if (std::abs(z0 - zp) <= kNearEquilibrium || std::abs(z0 - zm) <= kNearEquilibrium)
    throw EquilibriumInput("chart_flow: initial point is an equilibrium");
  if (std::abs(c.gamma) == 0.0) {
    // double root: z = -B/(2A) - 1 / (A (xi - xi0) - 1/(z0 + B/(2A)))
    const cplx w0 = z0 + c.B / (2.0 * c.A);
    const cplx den = c.A * (xi - xi0) - 1.0 / w0;
    if (std::abs(den) < kPoleDistance) throw PoleCrossing("chart_flow: solution blows up on the interval");
    return -c.B / (2.0 * c.A) - 1.0 / den;
  }
  const cplx delta0 = std::atan((2.0 * c.A * z0 + c.B) / c.gamma) - c.gamma * xi0 / 2.0;
  // the tan argument runs along a straight segment; reject it if it passes a pole pi/2 + k pi
  const cplx w_start = c.gamma * xi0 / 2.0 + delta0;
  const cplx w_end = c.gamma * xi / 2.0 + delta0;
  const cplx d = w_end - w_start;
  const double re_lo = std::min(w_start.real(), w_end.real()) - 1.0;
  const double re_hi = std::max(w_start.real(), w_end.real()) + 1.0;
  for (double k = std::floor((re_lo - kPi / 2.0) / kPi); kPi / 2.0 + k * kPi <= re_hi; k += 1.0) {
    const cplx pole(kPi / 2.0 + k * kPi, 0.0);
    double t = 0.0;
    const double dd = std::norm(d);
    if (dd > 0.0) t = std::clamp(((pole - w_start) * std::conj(d)).real() / dd, 0.0, 1.0);
    if (std::abs(w_start + t * d - pole) < kPoleDistance)
      throw PoleCrossing("chart_flow: trajectory passes a pole of the explicit solution");
  }
  return c.gamma / (2.0 * c.A) * std::tan(w_end) - c.B / (2.0 * c.A);
}

/// Speed and frequency of the explicit homogeneous wall (right-moving convention).
inline WaveFrame homogeneous_speed_frequency(const MaterialParams& mp) {
  mp.validate();
  if (!(mp.mu < 0.0)) throw DomainError("homogeneous family requires mu < 0");
  if (mp.c_cp != 0.0) throw DomainError("homogeneous family requires c_cp = 0");
  const double a2 = 1.0 + mp.alpha * mp.alpha;
  return {(mp.alpha * mp.h - mp.beta) / (std::sqrt(-mp.mu) * a2), (mp.h + mp.alpha * mp.beta) / a2};
}

/// (theta, p, q) = (2 atan(exp(sigma sqrt(-mu) xi)), sigma sqrt(-mu), 0).
inline ChartState homogeneous_profile(double xi, double mu, int sigma = 1) {
  if (!(mu < 0.0)) throw DomainError("homogeneous_profile requires mu < 0");
  if (sigma != 1 && sigma != -1) throw DomainError("sigma must be +1 or -1");
  const double k = std::sqrt(-mu);
  const double x = sigma * k * xi;
  // evaluate the half closer to the pole through the complementary angle to keep full precision
  const double theta = x <= 0.0 ? 2.0 * std::atan(std::exp(x)) : kPi - 2.0 * std::atan(std::exp(-x));
  return {theta, sigma * k, 0.0};
}

/// d/dxi of homogeneous_profile.
inline double homogeneous_profile_slope(double xi, double mu, int sigma = 1) {
  const double k = std::sqrt(-mu);
  return sigma * k / std::cosh(k * xi);
}

}  // namespace llgs
