#pragma once

// Regimes of the homogeneous family, field thresholds, frequency conditions
// and the stability curves of the (h, c_cp) diagram.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "llgs/analytic.hpp"
#include "llgs/errors.hpp"
#include "llgs/model.hpp"

namespace llgs {

enum class RegimeKind { Codim2, Center, Codim0 };

inline std::string to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::Codim2: return "codim2";
    case RegimeKind::Center: return "center";
    default: return "codim0";
  }
}

struct Regime {
  RegimeKind kind = RegimeKind::Codim2;
  double s0 = 0.0;
  double omega0 = 0.0;
  double h_star_low = 0.0;
  double h_star_high = 0.0;
};

/// Tolerance on s0 - 2 sqrt(-mu) / alpha within which the center case is reported.
inline constexpr double kRegimeTie = 1e-10;

/// (h_*, h^*) = beta/alpha +- (2 mu / alpha^2)(1 + alpha^2).
inline std::pair<double, double> thresholds(double alpha, double beta, double mu) {
  if (!(alpha > 0.0)) throw DomainError("thresholds: alpha must be > 0");
  if (!(mu < 0.0)) throw DomainError("thresholds: mu must be < 0");
  const double shift = 2.0 * mu / (alpha * alpha) * (1.0 + alpha * alpha);
  return {beta / alpha + shift, beta / alpha - shift};
}

/// Speed at which the theta = pi equilibrium of the family turns into a center.
inline double center_speed(double alpha, double mu) { return 2.0 * std::sqrt(-mu) / alpha; }

inline Regime classify_regime(const MaterialParams& mp) {
  mp.validate();
  if (mp.h < mp.beta / mp.alpha)
    throw OrientationError("classify_regime: h < beta/alpha describes a left-moving wall; reflect first");
  const WaveFrame f = homogeneous_speed_frequency(mp);
  const auto [lo, hi] = thresholds(mp.alpha, mp.beta, mp.mu);
  Regime r{RegimeKind::Codim2, f.s, f.omega, lo, hi};
  const double gap = f.s - center_speed(mp.alpha, mp.mu);
  if (std::abs(gap) <= kRegimeTie)
    r.kind = RegimeKind::Center;
  else if (gap > 0.0)
    r.kind = RegimeKind::Codim0;
  return r;
}

/// Spatial eigenvalues at E^0 = Z^0_- and E^pi = Z^pi_- along the homogeneous family.
struct HomogeneousEigenvalues {
  std::array<cplx, 3> zero;  // nu^0_{1,-}, nu^0_{2,-}, nu^0_{3,-}
  std::array<cplx, 3> pi;    // nu^pi_{1,-}, nu^pi_{2,-}, nu^pi_{3,-}
};

/// Labels follow chart_equilibria: nu_1 is d/dz of the complex field at the
/// equilibrium, which carries imaginary part -s0.
inline HomogeneousEigenvalues eigenvalues_homogeneous(double alpha, double beta, double mu, double h) {
  MaterialParams mp{alpha, beta, mu, h, 0.0};
  const double s0 = homogeneous_speed_frequency(mp).s;
  const double k = std::sqrt(-mu);
  HomogeneousEigenvalues ev;
  ev.zero = {cplx(-alpha * s0 - 2.0 * k, -s0), cplx(-alpha * s0 - 2.0 * k, s0), cplx(k, 0.0)};
  ev.pi = {cplx(-alpha * s0 + 2.0 * k, -s0), cplx(-alpha * s0 + 2.0 * k, s0), cplx(-k, 0.0)};
  return ev;
}

/// Existence condition for standing walls (s = 0) at the given frequency.
inline bool standing_wall_condition(const ChartId& chart, const MaterialParams& mp, double omega) {
  constexpr double kTie = 1e-12;
  if (chart.kind == ChartId::Kind::Zero) {
    const double crit = mp.beta_plus() / mp.alpha;
    if (std::abs(omega - crit) > kTie) return true;
    return omega <= mp.h - mp.mu;
  }
  if (chart.kind == ChartId::Kind::Pi) {
    const double crit = mp.beta_minus() / mp.alpha;
    if (std::abs(omega - crit) > kTie) return true;
    return omega >= mp.h + mp.mu;
  }
  throw DomainError("standing_wall_condition: chart must be Zero or Pi");
}

/// Both charts' equilibria are centers at once (gamma real and nonzero on both).
inline bool simultaneous_center(const MaterialParams& mp, const WaveFrame& wf) {
  constexpr double kTol = 1e-10;
  const cplx g0 = chart_coefficients(ChartId::zero(), mp, wf).gamma;
  const cplx gp = chart_coefficients(ChartId::pi(), mp, wf).gamma;
  auto real_nonzero = [](cplx g) { return std::abs(g.imag()) <= kTol && std::abs(g) > kTol; };
  return real_nonzero(g0) && real_nonzero(gp);
}

// ---- stability diagram ----

enum class Stability { Stable, Unstable };
enum class StabilityRegion { MonostableMinus, Bistable, MonostablePlus, Unstable };

inline std::string to_string(StabilityRegion r) {
  switch (r) {
    case StabilityRegion::MonostableMinus: return "monostable-";
    case StabilityRegion::Bistable: return "bistable";
    case StabilityRegion::MonostablePlus: return "monostable+";
    default: return "unstable";
  }
}

struct StabilityVerdict {
  Stability plus_e3 = Stability::Unstable;
  Stability minus_e3 = Stability::Unstable;
  StabilityRegion region = StabilityRegion::Unstable;
};

inline double gamma_plus(double alpha, double beta, double mu, double h) {
  if (h == mu) throw CurvePole("Gamma+ has a pole at h = mu");
  return (beta / alpha) / (h - mu) - 1.0;
}

inline double gamma_minus(double alpha, double beta, double mu, double h) {
  if (h == -mu) throw CurvePole("Gamma- has a pole at h = -mu");
  return 1.0 - (beta / alpha) / (h + mu);
}

/// +e3 is stable to the right of Gamma+, -e3 to the right of Gamma- (larger c_cp).
///
/// On the far side of each pole the curve no longer bounds the region: there
/// +e3 is unstable (h < mu) and -e3 stable (h < -mu) for every c_cp.
inline StabilityVerdict stability_verdict(const MaterialParams& mp) {
  mp.validate();
  const double gp = gamma_plus(mp.alpha, mp.beta, mp.mu, mp.h);
  const double gm = gamma_minus(mp.alpha, mp.beta, mp.mu, mp.h);
  StabilityVerdict v;
  const bool plus = mp.h > mp.mu && mp.c_cp > gp;
  const bool minus = mp.h < -mp.mu || mp.c_cp > gm;
  v.plus_e3 = plus ? Stability::Stable : Stability::Unstable;
  v.minus_e3 = minus ? Stability::Stable : Stability::Unstable;
  if (plus && minus)
    v.region = StabilityRegion::Bistable;
  else if (plus)
    v.region = StabilityRegion::MonostablePlus;
  else if (minus)
    v.region = StabilityRegion::MonostableMinus;
  else
    v.region = StabilityRegion::Unstable;
  return v;
}

/// h where Gamma+ and Gamma- cross.
inline double gamma_intersection(double alpha, double beta, double mu) {
  const double b = beta / alpha;
  return b / 2.0 + std::sqrt(b * b / 4.0 + mu * mu);
}

// ---- spatial reflection ----

/// xi -> -xi maps solutions at speed s to solutions at speed -s with (p, q) -> (-p, -q);
/// the material constants are untouched, only the orientation flag changes.
struct Reflection {
  MaterialParams mp;
  bool reflected = false;
};

inline Reflection reflect_parameters(const MaterialParams& mp) {
  return {mp, mp.h < mp.beta / mp.alpha};
}

inline Reflection reflect_parameters(const Reflection& r) { return {r.mp, !r.reflected}; }

inline WaveFrame reflect(const WaveFrame& wf) { return {-wf.s, wf.omega}; }
inline ChartState reflect(const ChartState& c) { return {c.theta, -c.p, -c.q}; }

}  // namespace llgs
