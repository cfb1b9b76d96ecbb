#pragma once

// Melnikov integrals along the homogeneous wall and the 2x3 splitting matrix
// in the deviations (c_cp, s - s0, Omega - Omega0).

#include <array>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Dense>

#include "llgs/analytic.hpp"
#include "llgs/classification.hpp"
#include "llgs/errors.hpp"
#include "llgs/model.hpp"

namespace llgs {

struct MelnikovIntegrals {
  double i_c = 0.0;
  double i_s = 0.0;
  double i_cc = 0.0;
  double i_cs = 0.0;
};

/// Corrected: imaginary part of the complex residue formula (matches quadrature).
/// Published: the separated closed form for I_CS with the sign of its cosine term as printed.
enum class MelnikovForm { Corrected, Published };

inline MelnikovIntegrals melnikov_integrals_closed(double alpha, double mu, double s0,
                                                   MelnikovForm form = MelnikovForm::Corrected) {
  if (!(alpha > 0.0) || !(mu < 0.0)) throw DomainError("melnikov: need alpha > 0 and mu < 0");
  const double r = std::sqrt(-mu);
  if (!(s0 >= 0.0) || !(s0 < 2.0 * r / alpha))
    throw DomainError("melnikov: s0 must lie in [0, 2 sqrt(-mu)/alpha)");
  if (s0 == 0.0) return {1.0 / (2.0 * r), 0.0, 0.0, 0.0};

  const double x = kPi * s0 / r;
  const double E = std::exp(x);
  const double one_minus_E = -std::expm1(x);
  const double half = kPi * alpha * s0 / (2.0 * r);
  const double c = std::cos(half);
  const double sg = std::sin(half);
  const double F = std::exp(x / 2.0);
  // 1 + E^2 - 2 E cos(2 half), rewritten without cancellation for small s0
  const double D = one_minus_E * one_minus_E + 4.0 * E * sg * sg;
  const double a2 = alpha * alpha;

  MelnikovIntegrals out;
  const double pq = kPi * s0 * s0 * r * F / (4.0 * mu * mu);
  out.i_cc = pq * (2.0 * alpha * one_minus_E * c + (1.0 - a2) * (1.0 + E) * sg) / D;
  const double cs_cos = form == MelnikovForm::Corrected ? -(1.0 - a2) : (1.0 - a2);
  out.i_cs = pq * (cs_cos * one_minus_E * c + 2.0 * alpha * (1.0 + E) * sg) / D;
  const double pl = kPi * s0 * F / (2.0 * mu);
  out.i_c = pl * (one_minus_E * c - alpha * (1.0 + E) * sg) / D;
  out.i_s = pl * (alpha * one_minus_E * c + (1.0 + E) * sg) / D;
  return out;
}

struct SplittingMatrix {
  Eigen::Matrix<double, 2, 3> m;
  Eigen::Vector3d kernel;  // unit, c_cp component >= 0

  /// (s, Omega) displacement per unit c_cp along the kernel.
  Eigen::Vector2d kernel_per_unit_c() const { return kernel.tail<2>() / kernel[0]; }
};

inline Eigen::Matrix<double, 2, 3> splitting_matrix_from(const MelnikovIntegrals& I, double alpha, double beta,
                                                         double mu) {
  const double r = std::sqrt(-mu);
  Eigen::Matrix<double, 2, 3> m;
  m << beta * I.i_cc, alpha * r * I.i_s - r * I.i_c, I.i_s + alpha * I.i_c,  //
      beta * I.i_cs, -alpha * r * I.i_c - r * I.i_s, -I.i_c + alpha * I.i_s;
  return m;
}

/// Null direction of a rank-2 2x3 matrix via the cross product of its rows.
inline Eigen::Vector3d kernel_direction(const Eigen::Matrix<double, 2, 3>& m) {
  Eigen::Vector3d k = Eigen::Vector3d(m.row(0)).cross(Eigen::Vector3d(m.row(1)));
  const double n = k.norm();
  if (n == 0.0) throw DomainError("kernel_direction: matrix is rank deficient");
  k /= n;
  if (k[0] < 0.0 || (k[0] == 0.0 && k[1] < 0.0)) k = -k;
  return k;
}

inline SplittingMatrix splitting_matrix(const MaterialParams& mp, MelnikovForm form = MelnikovForm::Corrected) {
  mp.validate();
  if (!(mp.mu < 0.0)) throw DomainError("splitting_matrix: mu must be < 0");
  if (mp.c_cp != 0.0) throw DomainError("splitting_matrix: expanded about c_cp = 0");
  const Regime reg = classify_regime(mp);
  if (reg.kind != RegimeKind::Codim2) throw RegimeError("splitting_matrix: parameters not in the codim-2 regime");
  SplittingMatrix sm;
  sm.m = splitting_matrix_from(melnikov_integrals_closed(mp.alpha, mp.mu, reg.s0, form), mp.alpha, mp.beta, mp.mu);
  sm.kernel = kernel_direction(sm.m);
  return sm;
}

/// First-order splitting for the deviation (c_cp, s - s0, Omega - Omega0).
inline Eigen::Vector2d splitting_value(const SplittingMatrix& sm, const Eigen::Vector3d& deviation) {
  return sm.m * deviation;
}

struct DeterminantCheck {
  double lhs = 0.0;        // (alpha I_S - I_C)^2 + (I_S + alpha I_C)^2
  double rhs = 0.0;        // (1 + alpha^2)^2 pi^2 s0^2 exp(pi s0 / sqrt(-mu))
  double rhs_exact = 0.0;  // rhs / (4 mu^2 D), what the closed forms actually give
};

inline DeterminantCheck determinant_identity_check(double alpha, double mu, double s0) {
  const MelnikovIntegrals I = melnikov_integrals_closed(alpha, mu, s0);
  const double r = std::sqrt(-mu);
  const double a2 = 1.0 + alpha * alpha;
  DeterminantCheck out;
  const double u = alpha * I.i_s - I.i_c;
  const double v = I.i_s + alpha * I.i_c;
  out.lhs = u * u + v * v;
  const double x = kPi * s0 / r;
  out.rhs = a2 * a2 * kPi * kPi * s0 * s0 * std::exp(x);
  if (s0 == 0.0) {
    out.rhs_exact = a2 / (4.0 * r * r);
  } else {
    const double sg = std::sin(kPi * alpha * s0 / (2.0 * r));
    const double D = std::expm1(x) * std::expm1(x) + 4.0 * std::exp(x) * sg * sg;
    out.rhs_exact = out.rhs / (4.0 * mu * mu * D);
  }
  return out;
}

}  // namespace llgs
