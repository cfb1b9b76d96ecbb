#pragma once

// Gauss-Legendre collocation of the heteroclinic boundary-value problem on
// [-L, L] and a damped Newton solver on the sparse (block-banded plus a few
// dense border rows/columns) Jacobian.
//
// Unknown layout, per mesh interval j: node value u_j (3) followed by the S
// stage slopes K_j1..K_jS (3 each); then the last node u_n; then the free
// scalars. Rows, per interval: S stage equations K_m - f(u_j + h sum_l a_ml K_l)
// and the continuity equation u_{j+1} - u_j - h sum_m b_m K_m; then boundary
// rows, the energy-gap row (center case) and the phase row.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "llgs/analytic.hpp"
#include "llgs/classification.hpp"
#include "llgs/errors.hpp"
#include "llgs/hamiltonian.hpp"
#include "llgs/integrator.hpp"
#include "llgs/model.hpp"
#include "llgs/profile.hpp"

namespace llgs {

struct BvpConfig {
  double L = 50.0;
  std::size_t n_mesh = 400;
  int collocation_order = 4;
  double newton_tol = 1e-10;
  int max_newton = 12;

  void validate() const {
    if (!(L > 0.0)) throw ConfigError("BvpConfig: L must be > 0");
    if (n_mesh < 50) throw ConfigError("BvpConfig: n_mesh must be >= 50");
    if (collocation_order < 3 || collocation_order > 5) throw ConfigError("BvpConfig: collocation_order in {3,4,5}");
    if (!(newton_tol > 0.0)) throw ConfigError("BvpConfig: newton_tol must be > 0");
    if (max_newton < 1) throw ConfigError("BvpConfig: max_newton must be >= 1");
  }
};

/// Butcher tableau of the S-stage Gauss-Legendre method.
struct GaussTableau {
  int stages = 0;
  Eigen::VectorXd c, b;
  Eigen::MatrixXd a;

  explicit GaussTableau(int s) : stages(s), c(s), b(s), a(s, s) {
    const auto zeros = boost::math::legendre_p_zeros<double>(s);  // non-negative roots
    std::vector<double> x;
    for (double z : zeros) {
      x.push_back(z);
      if (z != 0.0) x.push_back(-z);
    }
    std::sort(x.begin(), x.end());
    for (int i = 0; i < s; ++i) c[i] = 0.5 * (1.0 + x[std::size_t(i)]);
    // sum_l a_ml c_l^(k-1) = c_m^k / k and sum_l b_l c_l^(k-1) = 1/k
    Eigen::MatrixXd V(s, s);
    for (int k = 0; k < s; ++k)
      for (int l = 0; l < s; ++l) V(k, l) = std::pow(c[l], k);
    const auto lu = V.fullPivLu();
    Eigen::VectorXd rhs(s);
    for (int m = 0; m < s; ++m) {
      for (int k = 0; k < s; ++k) rhs[k] = std::pow(c[m], k + 1) / (k + 1);
      a.row(m) = lu.solve(rhs).transpose();
    }
    for (int k = 0; k < s; ++k) rhs[k] = 1.0 / (k + 1);
    b = lu.solve(rhs);
  }
};

enum class Param { Ccp, S, Omega, H, Htilde };

inline std::string to_string(Param p) {
  switch (p) {
    case Param::Ccp: return "c_cp";
    case Param::S: return "s";
    case Param::Omega: return "omega";
    case Param::H: return "h";
    default: return "htilde";
  }
}

inline Param param_from_string(const std::string& s) {
  if (s == "c_cp") return Param::Ccp;
  if (s == "s") return Param::S;
  if (s == "omega") return Param::Omega;
  if (s == "h") return Param::H;
  if (s == "htilde") return Param::Htilde;
  throw ConfigError("unknown parameter name '" + s + "'");
}

/// Everything the boundary-value problem depends on besides the profile.
struct ParamSet {
  MaterialParams mp;
  WaveFrame wf;
  double htilde = 0.0;

  double get(Param p) const {
    switch (p) {
      case Param::Ccp: return mp.c_cp;
      case Param::S: return wf.s;
      case Param::Omega: return wf.omega;
      case Param::H: return mp.h;
      default: return htilde;
    }
  }
  void set(Param p, double v) {
    switch (p) {
      case Param::Ccp: mp.c_cp = v; break;
      case Param::S: wf.s = v; break;
      case Param::Omega: wf.omega = v; break;
      case Param::H: mp.h = v; break;
      default: htilde = v;
    }
  }
};

enum class Codim0Bc { LeftPQ, PBothEnds };

/// Which boundary conditions are imposed and which scalars are solved for.
struct BvpSpec {
  RegimeKind regime = RegimeKind::Codim2;
  std::vector<Param> free;
  bool flat_constrained = false;  // center case: impose zero energy gap instead of measuring it
  Codim0Bc codim0_bc = Codim0Bc::LeftPQ;

  static BvpSpec defaults(RegimeKind k) {
    BvpSpec s;
    s.regime = k;
    if (k == RegimeKind::Codim2) s.free = {Param::S, Param::Omega};
    if (k == RegimeKind::Center) s.free = {Param::Htilde};
    return s;
  }
  static BvpSpec flat_center(Param freed) {
    BvpSpec s;
    s.regime = RegimeKind::Center;
    s.flat_constrained = true;
    s.free = {freed};
    return s;
  }
  bool slaves_omega() const { return regime == RegimeKind::Center; }
  int boundary_rows() const {
    switch (regime) {
      case RegimeKind::Codim2: return 4;
      case RegimeKind::Center: return 3;
      default: return 2;
    }
  }
};

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
};

/// Damped Newton on a sparse system; `assemble` fills F and (if requested) J at x.
using SparseAssemble = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::SparseMatrix<double>*)>;

inline Eigen::VectorXd newton_sparse(const SparseAssemble& assemble, Eigen::VectorXd x, double tol, int max_iter,
                                     NewtonReport* report = nullptr) {
  Eigen::VectorXd F;
  Eigen::SparseMatrix<double> J;
  assemble(x, F, nullptr);
  double fn = F.lpNorm<Eigen::Infinity>();
  int it = 0;
  for (; it < max_iter && !(fn < tol); ++it) {
    if (!std::isfinite(fn)) throw NoConvergence("newton: non-finite residual");
    assemble(x, F, &J);
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw SingularJacobian("newton: sparse LU failed (singular Jacobian)");
    const Eigen::VectorXd dx = lu.solve(-F);
    if (lu.info() != Eigen::Success || !dx.allFinite()) throw SingularJacobian("newton: linear solve failed");
    // backtracking on the 2-norm of the residual
    const double f2 = F.norm();
    double lam = 1.0;
    Eigen::VectorXd xn, Fn;
    for (;;) {
      xn = x + lam * dx;
      assemble(xn, Fn, nullptr);
      const double fn2 = Fn.norm();
      if (std::isfinite(fn2) && (fn2 <= (1.0 - 1e-4 * lam) * f2 || Fn.lpNorm<Eigen::Infinity>() < tol)) break;
      lam *= 0.5;
      if (lam < 1.0 / 64.0) break;  // take the damped step anyway; the iteration count bounds the damage
    }
    x = xn;
    F = Fn;
    fn = F.lpNorm<Eigen::Infinity>();
  }
  if (report) *report = {it, fn};
  if (!(fn < tol)) throw NoConvergence("newton: residual " + std::to_string(fn) + " after " + std::to_string(it) +
                                       " iterations");
  return x;
}

class CollocationBvp {
 public:
  CollocationBvp(BvpSpec spec, BvpConfig cfg) : spec_(std::move(spec)), cfg_(cfg), tab_(cfg.collocation_order) {
    cfg_.validate();
    const int need = 3 + int(spec_.free.size());
    const int have = spec_.boundary_rows() + 1;
    if (need != have)
      throw RegimeError("build_bvp: " + std::to_string(spec_.free.size()) + " free scalars do not match the " +
                        to_string(spec_.regime) + " boundary conditions");
    for (Param p : spec_.free) {
      if (spec_.slaves_omega() && p == Param::Omega) throw RegimeError("build_bvp: Omega is slaved in the center case");
      if (p == Param::Htilde && (spec_.regime != RegimeKind::Center || spec_.flat_constrained))
        throw RegimeError("build_bvp: the energy gap is only an unknown of the center system");
    }
    if (spec_.regime == RegimeKind::Center && !spec_.flat_constrained &&
        std::find(spec_.free.begin(), spec_.free.end(), Param::Htilde) == spec_.free.end())
      throw RegimeError("build_bvp: center system must carry the energy gap as unknown");
    const std::size_t n = cfg_.n_mesh;
    mesh_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) mesh_[i] = -cfg_.L + 2.0 * cfg_.L * double(i) / double(n);
  }

  const BvpSpec& spec() const { return spec_; }
  const BvpConfig& config() const { return cfg_; }
  const GaussTableau& tableau() const { return tab_; }
  const std::vector<double>& mesh() const { return mesh_; }
  int stages() const { return tab_.stages; }
  std::size_t intervals() const { return cfg_.n_mesh; }
  std::size_t block() const { return std::size_t(3 * (1 + stages())); }
  std::size_t n_state() const { return block() * intervals() + 3; }
  std::size_t n_free() const { return spec_.free.size(); }
  std::size_t n_unknowns() const { return n_state() + n_free(); }
  std::size_t node_index(std::size_t i) const { return i * block(); }
  std::size_t stage_index(std::size_t j, int m) const { return j * block() + 3 + 3 * std::size_t(m); }

  /// Parameters with the free scalars taken from x and the center-case frequency slaved.
  ParamSet params_of(const Eigen::VectorXd& x, const ParamSet& base) const {
    ParamSet p = base;
    for (std::size_t k = 0; k < n_free(); ++k) p.set(spec_.free[k], x[Eigen::Index(n_state() + k)]);
    if (spec_.slaves_omega()) p.wf.omega = center_frequency(ChartId::pi(), p.mp, p.wf.s);
    return p;
  }

  Eigen::Vector3d node(const Eigen::VectorXd& x, std::size_t i) const {
    return x.segment<3>(Eigen::Index(node_index(i)));
  }

  /// Packs a function of xi (nodes and stage slopes from the vector field) plus the free scalars.
  Eigen::VectorXd pack(const std::function<Eigen::Vector3d(double)>& u, const ParamSet& p) const {
    Eigen::VectorXd x(n_unknowns());
    for (std::size_t j = 0; j < intervals(); ++j) {
      const double h = mesh_[j + 1] - mesh_[j];
      x.segment<3>(Eigen::Index(node_index(j))) = u(mesh_[j]);
      for (int m = 0; m < stages(); ++m)
        x.segment<3>(Eigen::Index(stage_index(j, m))) = detail::rhs(u(mesh_[j] + tab_.c[m] * h), p.mp, p.wf);
    }
    x.segment<3>(Eigen::Index(node_index(intervals()))) = u(mesh_.back());
    for (std::size_t k = 0; k < n_free(); ++k) x[Eigen::Index(n_state() + k)] = p.get(spec_.free[k]);
    return x;
  }

  /// Packs a stored profile; stage slopes are reused when the profile carries matching ones.
  Eigen::VectorXd pack(const Profile& pr, const ParamSet& p) const {
    const bool same_mesh = pr.mesh.size() == mesh_.size() &&
                           std::abs(pr.mesh.front() - mesh_.front()) < 1e-12 &&
                           std::abs(pr.mesh.back() - mesh_.back()) < 1e-12;
    if (same_mesh && pr.stage_slopes.size() == intervals() * std::size_t(stages())) {
      Eigen::VectorXd x(n_unknowns());
      for (std::size_t j = 0; j <= intervals(); ++j) {
        const ChartState& s = pr.states[j];
        x.segment<3>(Eigen::Index(node_index(j))) = Eigen::Vector3d(s.theta, s.p, s.q);
      }
      for (std::size_t j = 0; j < intervals(); ++j)
        for (int m = 0; m < stages(); ++m)
          x.segment<3>(Eigen::Index(stage_index(j, m))) = pr.stage_slopes[j * std::size_t(stages()) + std::size_t(m)];
      for (std::size_t k = 0; k < n_free(); ++k) x[Eigen::Index(n_state() + k)] = p.get(spec_.free[k]);
      return x;
    }
    return pack(
        [&](double xi) {
          const ChartState s = pr.at(xi);
          return Eigen::Vector3d(s.theta, s.p, s.q);
        },
        p);
  }

  Profile unpack(const Eigen::VectorXd& x, const ParamSet& base) const {
    const ParamSet p = params_of(x, base);
    Profile pr;
    pr.mesh = mesh_;
    pr.mp = p.mp;
    pr.wf = p.wf;
    pr.regime = spec_.regime;
    pr.htilde = p.htilde;
    pr.states.resize(mesh_.size());
    for (std::size_t i = 0; i < mesh_.size(); ++i) {
      const Eigen::Vector3d u = node(x, i);
      pr.states[i] = {u[0], u[1], u[2]};
    }
    pr.stage_slopes.resize(intervals() * std::size_t(stages()));
    for (std::size_t j = 0; j < intervals(); ++j)
      for (int m = 0; m < stages(); ++m)
        pr.stage_slopes[j * std::size_t(stages()) + std::size_t(m)] =
            x.segment<3>(Eigen::Index(stage_index(j, m)));
    return pr;
  }

  /// Fixes the reference used by the phase condition and for picking equilibria by continuity.
  void set_reference(const Eigen::VectorXd& x, const ParamSet& base) {
    const ParamSet p = params_of(x, base);
    ref_nodes_.resize(mesh_.size());
    ref_slopes_.resize(mesh_.size());
    for (std::size_t i = 0; i < mesh_.size(); ++i) {
      ref_nodes_[i] = node(x, i);
      ref_slopes_[i] = detail::rhs(ref_nodes_[i], p.mp, p.wf);
    }
    ref_left_ = nearest(ChartId::zero(), p, cplx(x[1], x[2]), true);
    const Eigen::Vector3d ur = node(x, intervals());
    ref_right_ = nearest(ChartId::pi(), p, cplx(ur[1], ur[2]), false);
    has_ref_ = true;
  }

  /// Reference equilibria set explicitly (e.g. from the analytic family).
  void set_equilibrium_reference(cplx left, cplx right) {
    ref_left_ = left;
    ref_right_ = right;
  }

  cplx left_equilibrium(const ParamSet& p) const { return nearest(ChartId::zero(), p, ref_left_, false); }
  cplx right_equilibrium(const ParamSet& p) const { return nearest(ChartId::pi(), p, ref_right_, false); }

  std::size_t n_equations() const { return n_unknowns(); }

  Eigen::VectorXd residual(const Eigen::VectorXd& x, const ParamSet& base) const {
    Eigen::VectorXd F(n_unknowns());
    fill(x, base, F, nullptr);
    return F;
  }

  /// Residual and Jacobian; columns for free scalars by central differences.
  void assemble(const Eigen::VectorXd& x, const ParamSet& base, Eigen::VectorXd& F,
                Eigen::SparseMatrix<double>* J) const {
    F.resize(Eigen::Index(n_unknowns()));
    if (!J) {
      fill(x, base, F, nullptr);
      return;
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(intervals() * (3 * std::size_t(stages()) * (3 + 3 * std::size_t(stages())) + 3 * (5 + 3 * std::size_t(stages()))) +
                 mesh_.size() * 3 + 64 + n_unknowns() * n_free());
    fill(x, base, F, &trip);
    for (std::size_t k = 0; k < n_free(); ++k) {
      const Eigen::VectorXd col = free_column(x, base, k);
      for (Eigen::Index r = 0; r < col.size(); ++r)
        if (col[r] != 0.0) trip.emplace_back(int(r), int(n_state() + k), col[r]);
    }
    J->resize(Eigen::Index(n_unknowns()), Eigen::Index(n_unknowns()));
    J->setFromTriplets(trip.begin(), trip.end());
  }

  /// d residual / d parameter for a parameter held fixed in x (used as continuation direction).
  Eigen::VectorXd param_derivative(const Eigen::VectorXd& x, const ParamSet& base, Param which) const {
    const double v = base.get(which);
    const double d = 1e-6 * std::max(1.0, std::abs(v));
    ParamSet lo = base, hi = base;
    lo.set(which, v - d);
    hi.set(which, v + d);
    return (residual(x, hi) - residual(x, lo)) / (2.0 * d);
  }

  /// Energy gap of a packed solution (center case), measured at the right end.
  double measured_gap(const Eigen::VectorXd& x, const ParamSet& base) const {
    const ParamSet p = params_of(x, base);
    const Eigen::Vector3d ur = node(x, intervals());
    const cplx z = right_equilibrium(p);
    return hamiltonian(ChartId::pi(), ur[1], ur[2], p.mp, p.wf) -
           hamiltonian(ChartId::pi(), z.real(), z.imag(), p.mp, p.wf);
  }

 private:
  cplx nearest(const ChartId& chart, const ParamSet& p, cplx ref, bool prefer_source) const {
    if (prefer_source && chart.kind == ChartId::Kind::Zero) {
      // the source must have an unstable transverse direction
      try {
        return source_equilibrium(p.mp, p.wf).z;
      } catch (const SpectralMismatch&) {
      }
    }
    const auto [a, b] = chart_equilibria(chart, p.mp, p.wf);
    return std::abs(a.z - ref) < std::abs(b.z - ref) ? a.z : b.z;
  }

  Eigen::VectorXd free_column(const Eigen::VectorXd& x, const ParamSet& base, std::size_t k) const {
    const Eigen::Index idx = Eigen::Index(n_state() + k);
    const double v = x[idx];
    const double d = 1e-6 * std::max(1.0, std::abs(v));
    Eigen::VectorXd xp = x, xm = x;
    xp[idx] = v + d;
    xm[idx] = v - d;
    Eigen::VectorXd Fp(n_unknowns()), Fm(n_unknowns());
    fill(xp, base, Fp, nullptr);
    fill(xm, base, Fm, nullptr);
    return (Fp - Fm) / (2.0 * d);
  }

  void fill(const Eigen::VectorXd& x, const ParamSet& base, Eigen::VectorXd& F,
            std::vector<Eigen::Triplet<double>>* trip) const {
    if (!has_ref_) throw DomainError("CollocationBvp: reference profile not set");
    const ParamSet p = params_of(x, base);
    const int S = stages();
    const std::size_t n = intervals();
    auto add = [&](std::size_t r, std::size_t c, double v) {
      if (trip && v != 0.0) trip->emplace_back(int(r), int(c), v);
    };
    std::vector<Eigen::Vector3d> Y(static_cast<std::size_t>(S));
    for (std::size_t j = 0; j < n; ++j) {
      const double h = mesh_[j + 1] - mesh_[j];
      const std::size_t row0 = j * block();
      const Eigen::Vector3d uj = node(x, j);
      for (int m = 0; m < S; ++m) {
        Eigen::Vector3d y = uj;
        for (int l = 0; l < S; ++l) y += h * tab_.a(m, l) * x.segment<3>(Eigen::Index(stage_index(j, l)));
        Y[std::size_t(m)] = y;
      }
      for (int m = 0; m < S; ++m) {
        const std::size_t r = row0 + 3 * std::size_t(m);
        const Eigen::Vector3d Km = x.segment<3>(Eigen::Index(stage_index(j, m)));
        F.segment<3>(Eigen::Index(r)) = Km - detail::rhs(Y[std::size_t(m)], p.mp, p.wf);
        if (trip) {
          const Eigen::Matrix3d Jf = detail::rhs_jacobian(Y[std::size_t(m)], p.mp, p.wf);
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              add(r + std::size_t(a), node_index(j) + std::size_t(b), -Jf(a, b));
              for (int l = 0; l < S; ++l) {
                const double v = (l == m && a == b ? 1.0 : 0.0) - h * tab_.a(m, l) * Jf(a, b);
                add(r + std::size_t(a), stage_index(j, l) + std::size_t(b), v);
              }
            }
        }
      }
      const std::size_t rc = row0 + 3 * std::size_t(S);
      Eigen::Vector3d cont = node(x, j + 1) - uj;
      for (int m = 0; m < S; ++m) cont -= h * tab_.b[m] * x.segment<3>(Eigen::Index(stage_index(j, m)));
      F.segment<3>(Eigen::Index(rc)) = cont;
      for (int a = 0; a < 3; ++a) {
        add(rc + std::size_t(a), node_index(j + 1) + std::size_t(a), 1.0);
        add(rc + std::size_t(a), node_index(j) + std::size_t(a), -1.0);
        for (int m = 0; m < S; ++m) add(rc + std::size_t(a), stage_index(j, m) + std::size_t(a), -h * tab_.b[m]);
      }
    }

    std::size_t r = n * block();
    const std::size_t iL = node_index(0);
    const std::size_t iR = node_index(n);
    const Eigen::Vector3d uL = node(x, 0);
    const Eigen::Vector3d uR = node(x, n);
    auto pin = [&](std::size_t col, double value, double target) {
      F[Eigen::Index(r)] = value - target;
      add(r, col, 1.0);
      ++r;
    };
    const cplx zL = left_equilibrium(p);
    switch (spec_.regime) {
      case RegimeKind::Codim2: {
        const cplx zR = right_equilibrium(p);
        pin(iL + 1, uL[1], zL.real());
        pin(iL + 2, uL[2], zL.imag());
        pin(iR + 1, uR[1], zR.real());
        pin(iR + 2, uR[2], zR.imag());
        break;
      }
      case RegimeKind::Center: {
        pin(iL + 1, uL[1], zL.real());
        pin(iL + 2, uL[2], zL.imag());
        const cplx zR = right_equilibrium(p);
        const double gap = hamiltonian(ChartId::pi(), uR[1], uR[2], p.mp, p.wf) -
                           hamiltonian(ChartId::pi(), zR.real(), zR.imag(), p.mp, p.wf);
        const Eigen::Vector2d g = hamiltonian_gradient(ChartId::pi(), uR[1], uR[2], p.mp, p.wf);
        if (spec_.flat_constrained) {
          F[Eigen::Index(r)] = gap;
          add(r, iR + 1, g[0]);
          add(r, iR + 2, g[1]);
        } else {
          // the gap unknown's own column comes from the free-scalar differences
          F[Eigen::Index(r)] = p.htilde - gap;
          add(r, iR + 1, -g[0]);
          add(r, iR + 2, -g[1]);
        }
        ++r;
        break;
      }
      case RegimeKind::Codim0: {
        if (spec_.codim0_bc == Codim0Bc::LeftPQ) {
          pin(iL + 1, uL[1], zL.real());
          pin(iL + 2, uL[2], zL.imag());
        } else {
          const cplx zR = right_equilibrium(p);
          pin(iL + 1, uL[1], zL.real());
          pin(iR + 1, uR[1], zR.real());
        }
        break;
      }
    }

    // phase: trapezoidal <u - u_ref, u_ref'>
    double ph = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double w = 0.5 * ((i > 0 ? mesh_[i] - mesh_[i - 1] : 0.0) + (i < n ? mesh_[i + 1] - mesh_[i] : 0.0));
      const Eigen::Vector3d d = node(x, i) - ref_nodes_[i];
      ph += w * d.dot(ref_slopes_[i]);
      for (int a = 0; a < 3; ++a) add(r, node_index(i) + std::size_t(a), w * ref_slopes_[i][a]);
    }
    F[Eigen::Index(r)] = ph;
  }

  BvpSpec spec_;
  BvpConfig cfg_;
  GaussTableau tab_;
  std::vector<double> mesh_;
  std::vector<Eigen::Vector3d> ref_nodes_, ref_slopes_;
  cplx ref_left_{1.0, 0.0}, ref_right_{1.0, 0.0};
  bool has_ref_ = false;
};

/// Newton on the collocation system; the phase reference stays at the guess.
inline Eigen::VectorXd newton_solve(const CollocationBvp& bvp, const Eigen::VectorXd& guess, const ParamSet& base,
                                    NewtonReport* report = nullptr) {
  return newton_sparse(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& F, Eigen::SparseMatrix<double>* J) {
        bvp.assemble(x, base, F, J);
      },
      guess, bvp.config().newton_tol, bvp.config().max_newton, report);
}

/// Result of a single boundary-value solve, with the profile unpacked.
struct BvpSolution {
  Eigen::VectorXd x;
  ParamSet params;
  Profile profile;
  NewtonReport report;
};

/// Builds the system, seeds it from `guess` (nodes and stage slopes) and solves.
inline BvpSolution solve_bvp(CollocationBvp& bvp, const Profile& guess, const ParamSet& base) {
  Eigen::VectorXd x0 = bvp.pack(guess, base);
  bvp.set_reference(x0, base);
  BvpSolution sol;
  sol.x = newton_solve(bvp, x0, base, &sol.report);
  sol.params = bvp.params_of(sol.x, base);
  sol.profile = bvp.unpack(sol.x, base);
  return sol;
}

/// The homogeneous wall at the given parameters, in the regime of those parameters.
inline BvpSolution solve_homogeneous(CollocationBvp& bvp, const MaterialParams& mp) {
  ParamSet base;
  base.mp = mp;
  base.wf = homogeneous_speed_frequency(mp);
  const Eigen::VectorXd x0 = bvp.pack(
      [&](double xi) {
        const ChartState s = homogeneous_profile(xi, mp.mu, 1);
        return Eigen::Vector3d(s.theta, s.p, s.q);
      },
      base);
  bvp.set_reference(x0, base);
  BvpSolution sol;
  sol.x = newton_solve(bvp, x0, base, &sol.report);
  sol.params = bvp.params_of(sol.x, base);
  sol.profile = bvp.unpack(sol.x, base);
  return sol;
}

}  // namespace llgs
