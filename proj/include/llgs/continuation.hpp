#pragma once

// Pseudo-arclength continuation of collocation solutions in one parameter,
// and the scan for the end of the codim-2 branches as s decreases.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "llgs/collocation.hpp"
#include "llgs/errors.hpp"
#include "llgs/hamiltonian.hpp"

namespace llgs {

struct StepPolicy {
  double initial = 0.01;
  double min = 1e-5;
  double max = 0.05;
  double grow = 1.3;
  int grow_after = 3;
  std::size_t max_points = 5000;
};

enum class BranchEnd { ReachedTarget, Fold, NewtonFailure, StepUnderflow };

inline std::string to_string(BranchEnd e) {
  switch (e) {
    case BranchEnd::ReachedTarget: return "reached_target";
    case BranchEnd::Fold: return "fold";
    case BranchEnd::NewtonFailure: return "newton_failure";
    default: return "step_underflow";
  }
}

struct BranchPoint {
  double lambda = 0.0;
  ParamSet params;
  double step = 0.0;
  int newton_iterations = 0;
  double residual = 0.0;
  double tail_amplitude = 0.0;  // half peak-to-peak of q over the last quarter of the mesh
};

struct Branch {
  Param parameter = Param::Ccp;
  std::vector<Param> free;
  std::vector<BranchPoint> points;
  BranchEnd terminated = BranchEnd::ReachedTarget;
  Eigen::VectorXd last_x;
  Profile last_profile;
};

inline double profile_tail_amplitude(const Profile& pr, double window = 0.25) {
  const std::size_t n = pr.size();
  const std::size_t first = n - std::max<std::size_t>(2, std::size_t(window * double(n)));
  double lo = pr.states[first].q, hi = lo;
  for (std::size_t i = first; i < n; ++i) {
    lo = std::min(lo, pr.states[i].q);
    hi = std::max(hi, pr.states[i].q);
  }
  return 0.5 * (hi - lo);
}

namespace detail {

// Weighted inner product: profile unknowns averaged, scalars (free ones and lambda) at full weight.
struct ArcMetric {
  std::size_t n_state;
  Eigen::VectorXd w;

  explicit ArcMetric(std::size_t n_state_, std::size_t n_total) : n_state(n_state_), w(Eigen::Index(n_total)) {
    w.setOnes();
    w.head(Eigen::Index(n_state)).setConstant(1.0 / double(n_state));
  }
  double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return (a.array() * w.array() * b.array()).sum(); }
  double norm(const Eigen::VectorXd& a) const { return std::sqrt(dot(a, a)); }
};

}  // namespace detail

/// Continues `start` in `lambda` toward `target`. Failures end the branch with a
/// recorded reason; they are not thrown.
inline Branch continue_branch(CollocationBvp& bvp, const BvpSolution& start, Param lambda, double target,
                              const StepPolicy& pol = {}) {
  for (Param p : bvp.spec().free)
    if (p == lambda) throw ConfigError("continue_branch: continuation parameter is already a free scalar");
  if (bvp.spec().slaves_omega() && lambda == Param::Omega)
    throw ConfigError("continue_branch: Omega is slaved in the center case");

  const std::size_t N = bvp.n_unknowns();
  const detail::ArcMetric metric(bvp.n_state(), N + 1);
  Branch br;
  br.parameter = lambda;
  br.free = bvp.spec().free;

  ParamSet base = start.params;
  Eigen::VectorXd y(Eigen::Index(N + 1));
  y.head(Eigen::Index(N)) = start.x;
  y[Eigen::Index(N)] = base.get(lambda);
  bvp.set_reference(start.x, base);

  auto with_lambda = [&](double lam) {
    ParamSet p = base;
    p.set(lambda, lam);
    return p;
  };
  auto record = [&](const Eigen::VectorXd& yy, double step, const NewtonReport& rep) {
    BranchPoint pt;
    pt.lambda = yy[Eigen::Index(N)];
    const ParamSet b = with_lambda(pt.lambda);
    pt.params = bvp.params_of(yy.head(Eigen::Index(N)), b);
    pt.step = step;
    pt.newton_iterations = rep.iterations;
    pt.residual = rep.residual;
    br.last_x = yy.head(Eigen::Index(N));
    br.last_profile = bvp.unpack(br.last_x, b);
    pt.tail_amplitude = profile_tail_amplitude(br.last_profile);
    br.points.push_back(pt);
  };
  record(y, 0.0, start.report);

  // tangent from the bordered system [J F_lambda; v^T] t = [0; 1]
  auto tangent = [&](const Eigen::VectorXd& yy, const Eigen::VectorXd& border) -> Eigen::VectorXd {
    const ParamSet b = with_lambda(yy[Eigen::Index(N)]);
    const Eigen::VectorXd x = yy.head(Eigen::Index(N));
    Eigen::VectorXd F;
    Eigen::SparseMatrix<double> J;
    bvp.assemble(x, b, F, &J);
    const Eigen::VectorXd Fl = bvp.param_derivative(x, b, lambda);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(J.nonZeros()) + 2 * N + 2);
    for (int k = 0; k < J.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
    for (std::size_t r = 0; r < N; ++r)
      if (Fl[Eigen::Index(r)] != 0.0) trip.emplace_back(int(r), int(N), Fl[Eigen::Index(r)]);
    for (std::size_t c = 0; c <= N; ++c)
      if (border[Eigen::Index(c)] != 0.0) trip.emplace_back(int(N), int(c), border[Eigen::Index(c)]);
    Eigen::SparseMatrix<double> A(Eigen::Index(N + 1), Eigen::Index(N + 1));
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SingularJacobian("continue_branch: singular bordered system");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Eigen::Index(N + 1));
    rhs[Eigen::Index(N)] = 1.0;
    Eigen::VectorXd t = lu.solve(rhs);
    if (!t.allFinite()) throw SingularJacobian("continue_branch: tangent solve failed");
    return t / metric.norm(t);
  };

  const double dir = target >= y[Eigen::Index(N)] ? 1.0 : -1.0;
  Eigen::VectorXd e_lam = Eigen::VectorXd::Zero(Eigen::Index(N + 1));
  e_lam[Eigen::Index(N)] = 1.0;
  Eigen::VectorXd t;
  try {
    t = tangent(y, e_lam);
  } catch (const Error&) {
    br.terminated = BranchEnd::NewtonFailure;
    return br;
  }
  if (t[Eigen::Index(N)] * dir < 0.0) t = -t;

  double ds = std::clamp(pol.initial, pol.min, pol.max);
  int successes = 0;
  std::size_t stalled = 0;
  const double tol = bvp.config().newton_tol;
  const int max_it = bvp.config().max_newton;

  while (br.points.size() < pol.max_points) {
    const double lam = y[Eigen::Index(N)];
    if (std::abs(target - lam) <= 1e-14 * std::max(1.0, std::abs(target))) {
      br.terminated = BranchEnd::ReachedTarget;
      return br;
    }
    // land exactly on the target once the predictor would pass it
    const double tl = t[Eigen::Index(N)];
    const bool final_step = tl * dir > 0.0 && (lam + ds * tl - target) * dir >= 0.0;
    Eigen::VectorXd ynew;
    NewtonReport rep;
    try {
      if (final_step) {
        const double step = (target - lam) / tl;
        const Eigen::VectorXd yp = y + step * t;
        const ParamSet b = with_lambda(target);
        const Eigen::VectorXd x = newton_solve(bvp, yp.head(Eigen::Index(N)), b, &rep);
        ynew = yp;
        ynew.head(Eigen::Index(N)) = x;
        ynew[Eigen::Index(N)] = target;
      } else {
        const Eigen::VectorXd yp = y + ds * t;
        const Eigen::VectorXd wt = metric.w.cwiseProduct(t);
        auto assemble = [&](const Eigen::VectorXd& yy, Eigen::VectorXd& G, Eigen::SparseMatrix<double>* JG) {
          const ParamSet b = with_lambda(yy[Eigen::Index(N)]);
          const Eigen::VectorXd x = yy.head(Eigen::Index(N));
          Eigen::VectorXd F;
          G.resize(Eigen::Index(N + 1));
          if (!JG) {
            bvp.assemble(x, b, F, nullptr);
          } else {
            Eigen::SparseMatrix<double> J;
            bvp.assemble(x, b, F, &J);
            const Eigen::VectorXd Fl = bvp.param_derivative(x, b, lambda);
            std::vector<Eigen::Triplet<double>> trip;
            trip.reserve(std::size_t(J.nonZeros()) + 2 * N + 2);
            for (int k = 0; k < J.outerSize(); ++k)
              for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it)
                trip.emplace_back(it.row(), it.col(), it.value());
            for (std::size_t r = 0; r < N; ++r)
              if (Fl[Eigen::Index(r)] != 0.0) trip.emplace_back(int(r), int(N), Fl[Eigen::Index(r)]);
            for (std::size_t c = 0; c <= N; ++c)
              if (wt[Eigen::Index(c)] != 0.0) trip.emplace_back(int(N), int(c), wt[Eigen::Index(c)]);
            JG->resize(Eigen::Index(N + 1), Eigen::Index(N + 1));
            JG->setFromTriplets(trip.begin(), trip.end());
          }
          G.head(Eigen::Index(N)) = F;
          G[Eigen::Index(N)] = wt.dot(yy - yp);
        };
        ynew = newton_sparse(assemble, yp, tol, max_it, &rep);
      }
    } catch (const Error&) {
      successes = 0;
      ds *= 0.5;
      if (ds < pol.min) {
        br.terminated = BranchEnd::NewtonFailure;
        return br;
      }
      continue;
    }

    const double moved = std::abs(ynew[Eigen::Index(N)] - lam);
    stalled = moved < 1e-14 ? stalled + 1 : 0;
    if (stalled >= 5) {
      br.terminated = BranchEnd::StepUnderflow;
      return br;
    }

    Eigen::VectorXd tn;
    try {
      bvp.set_reference(ynew.head(Eigen::Index(N)), with_lambda(ynew[Eigen::Index(N)]));
      tn = tangent(ynew, metric.w.cwiseProduct(t));
    } catch (const Error&) {
      y = ynew;
      record(y, ds, rep);
      br.terminated = BranchEnd::NewtonFailure;
      return br;
    }
    if (metric.dot(tn, t) < 0.0) tn = -tn;
    y = ynew;
    record(y, final_step ? moved : ds, rep);
    if (final_step) {
      br.terminated = BranchEnd::ReachedTarget;
      return br;
    }
    if (tn[Eigen::Index(N)] * t[Eigen::Index(N)] < 0.0) {
      br.terminated = BranchEnd::Fold;
      return br;
    }
    t = tn;
    if (++successes >= pol.grow_after) {
      ds = std::min(ds * pol.grow, pol.max);
      successes = 0;
    }
  }
  br.terminated = BranchEnd::StepUnderflow;
  return br;
}

/// Restarts a solution from the end of a branch.
inline BvpSolution branch_end_solution(const Branch& br) {
  BvpSolution sol;
  sol.x = br.last_x;
  sol.params = br.points.back().params;
  sol.profile = br.last_profile;
  sol.report = {br.points.back().newton_iterations, br.points.back().residual};
  return sol;
}

struct SweepRow {
  double value = 0.0;       // parameter value actually reached
  double measured = 0.0;    // energy gap of the computed profile
  double quadratic = 0.0;   // second-order prediction about the base point
  bool reached = false;
};

/// Energy gap of center-type walls along a sweep in c_cp, s or h, starting at the
/// homogeneous wall of `mp` (which must sit on the center threshold). Targets on each
/// side of the base value are reached by successive continuation outward.
inline std::vector<SweepRow> center_sweep(const MaterialParams& mp, Param which, std::vector<double> values,
                                          const BvpConfig& cfg = {}, const StepPolicy& pol = {}) {
  if (which != Param::Ccp && which != Param::S && which != Param::H)
    throw ConfigError("center_sweep: parameter must be c_cp, s or h");
  CollocationBvp bvp(BvpSpec::defaults(RegimeKind::Center), cfg);
  const BvpSolution base = solve_homogeneous(bvp, mp);
  const double v0 = base.params.get(which);
  const double s0 = base.params.wf.s, h0 = mp.h;
  const QuadraticForm2 quad = htilde_quadratic(mp.alpha, mp.beta, mp.mu);
  std::sort(values.begin(), values.end());

  std::vector<SweepRow> rows(values.size());
  auto fill = [&](std::size_t i, const BvpSolution& sol) {
    rows[i].value = sol.params.get(which);
    rows[i].measured = sol.params.htilde;
    rows[i].quadratic = quad(sol.params.wf.s - s0, sol.params.mp.h - h0);
    rows[i].reached = true;
  };
  // upward from the base, then downward
  for (int dir : {+1, -1}) {
    BvpSolution cur = base;
    bvp.set_reference(cur.x, cur.params);
    for (std::size_t k = 0; k < values.size(); ++k) {
      const std::size_t i = dir > 0 ? k : values.size() - 1 - k;
      const double v = values[i];
      if (dir > 0 ? v < v0 : v >= v0) continue;
      if (v == cur.params.get(which)) {
        fill(i, cur);
        continue;
      }
      Branch br = continue_branch(bvp, cur, which, v, pol);
      if (br.terminated != BranchEnd::ReachedTarget) break;
      cur = branch_end_solution(br);
      fill(i, cur);
    }
  }
  return rows;
}

struct TerminationPoint {
  double c_cp = 0.0;
  double s_terminal = 0.0;
  double omega_terminal = 0.0;
  double h_terminal = 0.0;
  BranchEnd reason = BranchEnd::ReachedTarget;
};

struct TerminationBoundary {
  std::vector<TerminationPoint> points;
  Eigen::Vector4d s_fit = Eigen::Vector4d::Zero();      // s_terminal ~ sum_k s_fit[k] c^k
  Eigen::Vector4d omega_fit = Eigen::Vector4d::Zero();  // same for Omega
};

/// For each c_cp: continue the homogeneous wall at `mp` (codim-2) in c_cp, then
/// continue in s toward 0 with (h, Omega) free and record the last converged point.
inline TerminationBoundary termination_boundary(const MaterialParams& mp, const std::vector<double>& c_values,
                                                const BvpConfig& cfg = {}, const StepPolicy& pol = {}) {
  if (classify_regime(mp).kind != RegimeKind::Codim2) throw RegimeError("termination_boundary: needs codim-2 start");
  TerminationBoundary out;
  for (double c : c_values) {
    CollocationBvp sys(BvpSpec::defaults(RegimeKind::Codim2), cfg);
    BvpSolution sol = solve_homogeneous(sys, mp);
    TerminationPoint tp;
    tp.c_cp = c;
    if (c != 0.0) {
      Branch bc = continue_branch(sys, sol, Param::Ccp, c, pol);
      if (bc.terminated != BranchEnd::ReachedTarget) {
        tp.reason = bc.terminated;
        tp.s_terminal = bc.points.back().params.wf.s;
        tp.omega_terminal = bc.points.back().params.wf.omega;
        tp.h_terminal = bc.points.back().params.mp.h;
        out.points.push_back(tp);
        continue;
      }
      sol.x = bc.last_x;
      sol.params = bc.points.back().params;
      sol.profile = bc.last_profile;
    }
    BvpSpec spec = BvpSpec::defaults(RegimeKind::Codim2);
    spec.free = {Param::H, Param::Omega};
    CollocationBvp sys_s(spec, cfg);
    BvpSolution start;
    start.params = sol.params;
    start.x = sys_s.pack(sol.profile, sol.params);
    sys_s.set_reference(start.x, start.params);
    start.x = newton_solve(sys_s, start.x, start.params, &start.report);
    Branch bs = continue_branch(sys_s, start, Param::S, 0.0, pol);
    const BranchPoint& last = bs.points.back();
    tp.s_terminal = last.params.wf.s;
    tp.omega_terminal = last.params.wf.omega;
    tp.h_terminal = last.params.mp.h;
    tp.reason = bs.terminated;
    out.points.push_back(tp);
  }
  // cubic least-squares fits (lower degree when there are too few points)
  const Eigen::Index n = Eigen::Index(out.points.size());
  const int deg = int(std::min<Eigen::Index>(3, n - 1));
  if (deg >= 0) {
    Eigen::MatrixXd V(n, deg + 1);
    Eigen::VectorXd ys(n), yo(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int k = 0; k <= deg; ++k) V(i, k) = std::pow(out.points[std::size_t(i)].c_cp, k);
      ys[i] = out.points[std::size_t(i)].s_terminal;
      yo[i] = out.points[std::size_t(i)].omega_terminal;
    }
    const auto qr = V.colPivHouseholderQr();
    out.s_fit.head(deg + 1) = qr.solve(ys);
    out.omega_fit.head(deg + 1) = qr.solve(yo);
  }
  return out;
}

}  // namespace llgs
