#pragma once

// Adaptive integration of the coherent-structure ODE (dopri5 with dense output,
// event location), unstable-manifold shooting off the theta = 0 chart and tail
// classification of the resulting orbits.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "llgs/analytic.hpp"
#include "llgs/errors.hpp"
#include "llgs/hamiltonian.hpp"
#include "llgs/model.hpp"

namespace llgs {

enum class RhsKind { Desingularized, Singular };

struct Event {
  std::function<double(double, const Eigen::Vector3d&)> g;
  int direction = 0;  // +1: g rising through 0, -1: falling, 0: either
  bool terminal = false;
};

struct EventHit {
  std::size_t event = 0;
  double xi = 0.0;
  Eigen::Vector3d y;
};

enum class Termination { ReachedEnd, TerminalEvent };

struct IntegrateOptions {
  double tol = 1e-10;
  double blowup = 1e8;
  double min_step = 1e-14;
  std::size_t max_steps = 5'000'000;
  std::vector<Event> events;
};

/// Accepted steps of one integration, stored in increasing xi with slopes for Hermite dense output.
struct Trajectory {
  RhsKind kind = RhsKind::Desingularized;
  std::vector<double> xs;
  std::vector<Eigen::Vector3d> ys;
  std::vector<Eigen::Vector3d> dys;
  std::vector<EventHit> events;
  std::size_t steps = 0;
  std::size_t rhs_evals = 0;
  double tol = 0.0;
  Termination reason = Termination::ReachedEnd;

  std::size_t size() const { return xs.size(); }
  ChartState state(std::size_t i) const { return {ys[i][0], ys[i][1], ys[i][2]}; }
  const Eigen::Vector3d& front() const { return ys.front(); }
  const Eigen::Vector3d& back() const { return ys.back(); }

  Eigen::Vector3d at(double xi) const {
    if (xi <= xs.front()) return ys.front();
    if (xi >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), xi);
    const std::size_t j = std::size_t(it - xs.begin()) - 1;
    const double h = xs[j + 1] - xs[j];
    const double t = (xi - xs[j]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys[j] + (t3 - 2 * t2 + t) * h * dys[j] + (-2 * t3 + 3 * t2) * ys[j + 1] +
           (t3 - t2) * h * dys[j + 1];
  }
};

namespace detail {

using odeint_state = std::array<double, 3>;

inline Eigen::Vector3d field(RhsKind kind, const Eigen::Vector3d& y, const MaterialParams& mp, const WaveFrame& wf) {
  if (kind == RhsKind::Desingularized) return rhs(y, mp, wf);
  const SingularState d = singular_rhs({y[0], y[1], y[2]}, mp, wf);
  return {d.theta, d.psi, d.q};
}

}  // namespace detail

inline Trajectory integrate(RhsKind kind, const Eigen::Vector3d& y0, double xi0, double xi1, const MaterialParams& mp,
                            const WaveFrame& wf, const IntegrateOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  using detail::odeint_state;
  if (!(opt.tol >= 1e-13 && opt.tol <= 1e-3)) throw DomainError("integrate: tol must lie in [1e-13, 1e-3]");
  mp.validate();
  validate_theta(y0[0]);
  if (xi1 == xi0) throw DomainError("integrate: empty span");

  Trajectory tr;
  tr.kind = kind;
  tr.tol = opt.tol;
  const double dir = xi1 > xi0 ? 1.0 : -1.0;
  auto sys = [&](const odeint_state& x, odeint_state& dxdt, double) {
    ++tr.rhs_evals;
    const Eigen::Vector3d d = detail::field(kind, Eigen::Vector3d(x[0], x[1], x[2]), mp, wf);
    dxdt = {d[0], d[1], d[2]};
  };
  auto stepper = odeint::make_dense_output(opt.tol, opt.tol, odeint::runge_kutta_dopri5<odeint_state>());
  odeint_state x{y0[0], y0[1], y0[2]};
  const double dt0 = dir * std::min(1e-3, std::abs(xi1 - xi0));
  stepper.initialize(x, xi0, dt0);

  auto record = [&](double xi, const Eigen::Vector3d& y) {
    tr.xs.push_back(xi);
    tr.ys.push_back(y);
    tr.dys.push_back(detail::field(kind, y, mp, wf));
  };
  auto to_vec = [](const odeint_state& s) { return Eigen::Vector3d(s[0], s[1], s[2]); };
  auto dense = [&](double xi) {
    odeint_state tmp;
    stepper.calc_state(xi, tmp);
    return to_vec(tmp);
  };

  record(xi0, y0);
  std::vector<double> g_prev(opt.events.size());
  for (std::size_t e = 0; e < opt.events.size(); ++e) g_prev[e] = opt.events[e].g(xi0, y0);

  bool done = false;
  while (!done) {
    if (tr.steps >= opt.max_steps) throw StepFailure("integrate: step budget exhausted");
    const double remaining = xi1 - stepper.current_time();
    if (std::abs(stepper.current_time_step()) > std::abs(remaining))
      stepper.initialize(stepper.current_state(), stepper.current_time(), remaining);
    std::pair<double, double> span;
    try {
      span = stepper.do_step(sys);
    } catch (const odeint::odeint_error& err) {
      throw StepFailure(std::string("integrate: ") + err.what());
    } catch (const SingularEvaluation&) {
      throw;
    }
    ++tr.steps;
    const double h = span.second - span.first;
    const bool at_end = std::abs(xi1 - span.second) <= 1e-14 * std::max(1.0, std::abs(xi1));
    if (std::abs(h) < opt.min_step && !at_end) throw StepFailure("integrate: step size underflow");
    const Eigen::Vector3d y = to_vec(stepper.current_state());
    if (!y.allFinite() || std::abs(y[1]) + std::abs(y[2]) > opt.blowup)
      throw BlowUp("integrate: |p| + |q| exceeded the blow-up bound");

    // events: sign change across the step, root refined on the dense output
    double stop_at = span.second;
    bool terminal_hit = false;
    for (std::size_t e = 0; e < opt.events.size(); ++e) {
      const Event& ev = opt.events[e];
      const double g1 = ev.g(span.second, y);
      const double g0 = g_prev[e];
      g_prev[e] = g1;
      const bool rising = g0 < 0.0 && g1 >= 0.0;
      const bool falling = g0 > 0.0 && g1 <= 0.0;
      const double sgn = dir;  // direction is measured in increasing xi
      const bool hit = (ev.direction == 0 && (rising || falling)) ||
                       (ev.direction * sgn > 0 && rising) || (ev.direction * sgn < 0 && falling);
      if (!hit) continue;
      auto f = [&](double xi) { return ev.g(xi, dense(xi)); };
      double xe = span.second;
      if (g1 != 0.0) {
        boost::uintmax_t iters = 100;
        const auto root = boost::math::tools::toms748_solve(
            f, std::min(span.first, span.second), std::max(span.first, span.second), dir > 0 ? g0 : g1,
            dir > 0 ? g1 : g0, boost::math::tools::eps_tolerance<double>(52), iters);
        xe = 0.5 * (root.first + root.second);
      }
      tr.events.push_back({e, xe, dense(xe)});
      if (ev.terminal && dir * (xe - stop_at) <= 0.0) {
        stop_at = xe;
        terminal_hit = true;
      }
    }
    if (terminal_hit) {
      record(stop_at, dense(stop_at));
      // drop events located past the terminal point
      std::erase_if(tr.events, [&](const EventHit& h) { return dir * (h.xi - stop_at) > 0.0; });
      tr.reason = Termination::TerminalEvent;
      done = true;
    } else {
      record(span.second, y);
      if (at_end) done = true;
    }
  }
  if (dir < 0.0) {
    std::reverse(tr.xs.begin(), tr.xs.end());
    std::reverse(tr.ys.begin(), tr.ys.end());
    std::reverse(tr.dys.begin(), tr.dys.end());
  }
  for (const auto& y : tr.ys)
    if (kind == RhsKind::Desingularized && (y[0] < -1e-12 || y[0] > kPi + 1e-12))
      throw DomainError("integrate: trajectory left the cylinder theta in [0, pi]");
  return tr;
}

inline Trajectory integrate(const ChartState& s0, double xi0, double xi1, const MaterialParams& mp,
                            const WaveFrame& wf, const IntegrateOptions& opt = {}) {
  return integrate(RhsKind::Desingularized, Eigen::Vector3d(s0.theta, s0.p, s0.q), xi0, xi1, mp, wf, opt);
}

// ---- shooting ----

/// The theta = 0 equilibrium whose transverse eigenvalue Re z is positive
/// (one-dimensional unstable manifold leaving the chart). Prefers the sigma = - label.
inline ChartEquilibrium source_equilibrium(const MaterialParams& mp, const WaveFrame& wf) {
  const auto [plus, minus] = chart_equilibria(ChartId::zero(), mp, wf);
  if (minus.z.real() > 0.0) return minus;
  if (plus.z.real() > 0.0) return plus;
  throw SpectralMismatch("source_equilibrium: no theta = 0 equilibrium with an unstable transverse direction");
}

inline ChartState unstable_seed(const ChartEquilibrium& eq, double epsilon) {
  if (eq.chart.kind != ChartId::Kind::Zero) throw DomainError("unstable_seed: equilibrium must lie on theta = 0");
  int unstable = 0;
  for (const cplx& nu : eq.eigenvalues)
    if (nu.real() > 0.0) ++unstable;
  if (unstable != 1 || !(eq.eigenvalues[2].real() > 0.0))
    throw SpectralMismatch("unstable_seed: equilibrium needs exactly one unstable eigenvalue, transverse to the chart");
  // at theta = 0 the transverse eigenvector is exactly e_theta
  return {epsilon, eq.z.real(), eq.z.imag()};
}

struct TailVerdict {
  Flatness kind = Flatness::Undetermined;
  double q_limit_estimate = std::nan("");
  double oscillation_amplitude = 0.0;
};

inline constexpr double kFlatAmplitude = 1e-7;
inline constexpr double kNonFlatAmplitude = 1e-5;

/// Classifies the final `window` fraction of a trajectory by the peak-to-peak of q.
inline TailVerdict classify_tail(const Trajectory& tr, double window = 0.25, std::size_t samples = 4000) {
  TailVerdict v;
  const double x1 = tr.xs.back();
  const double x0 = x1 - window * (x1 - tr.xs.front());
  auto half_amp = [&](double a, double b, double& mean) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    const std::size_t n = samples / 2;
    for (std::size_t i = 0; i <= n; ++i) {
      const double q = tr.at(a + (b - a) * double(i) / double(n))[2];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      sum += q;
    }
    mean = sum / double(n + 1);
    return 0.5 * (hi - lo);
  };
  double m_all = 0.0, m1 = 0.0, m2 = 0.0;
  const double xm = 0.5 * (x0 + x1);
  v.oscillation_amplitude = half_amp(x0, x1, m_all);
  const double a1 = half_amp(x0, xm, m1);
  const double a2 = half_amp(xm, x1, m2);
  if (!std::isfinite(m_all) || std::abs(m_all) > 1e6) return v;  // unbounded q: not classified
  if (v.oscillation_amplitude < kFlatAmplitude) {
    v.kind = Flatness::Flat;
    v.q_limit_estimate = tr.back()[2];
  } else if (a1 > kNonFlatAmplitude && a2 > kNonFlatAmplitude) {
    v.kind = Flatness::NonFlat;
  }
  return v;
}

struct ShootOptions {
  double epsilon = 1e-6;
  double tol = 1e-12;
  double budget = 0.0;           // xi-span; 0 selects 400 / sqrt(-mu)
  double arrival = 1e-4;         // stop once theta > pi - arrival
  double stall = 1e-2;           // NoConnection if theta never exceeds pi - stall
  double tail_extension = 0.0;   // optional extra span integrated past arrival
};

struct ShootResult {
  Trajectory trajectory;
  TailVerdict tail;
  ChartEquilibrium source;
};

inline ShootResult shoot_to_pi_chart(const MaterialParams& mp, const WaveFrame& wf, const ShootOptions& so = {}) {
  ShootResult out;
  out.source = source_equilibrium(mp, wf);
  const ChartState seed = unstable_seed(out.source, so.epsilon);
  const double budget = so.budget > 0.0 ? so.budget : 400.0 / std::sqrt(std::abs(mp.mu));
  IntegrateOptions io;
  io.tol = so.tol;
  io.events.push_back({[&](double, const Eigen::Vector3d& y) { return y[0] - (kPi - so.arrival); }, +1, true});
  Trajectory tr = integrate(seed, 0.0, budget, mp, wf, io);
  if (tr.reason != Termination::TerminalEvent) {
    double best = 0.0;
    for (const auto& y : tr.ys) best = std::max(best, y[0]);
    if (best < kPi - so.stall) throw NoConnection("shoot_to_pi_chart: theta stalled below pi");
  } else if (so.tail_extension > 0.0) {
    IntegrateOptions ext;
    ext.tol = so.tol;
    const Trajectory more = integrate(RhsKind::Desingularized, tr.back(), tr.xs.back(),
                                      tr.xs.back() + so.tail_extension, mp, wf, ext);
    for (std::size_t i = 1; i < more.size(); ++i) {
      tr.xs.push_back(more.xs[i]);
      tr.ys.push_back(more.ys[i]);
      tr.dys.push_back(more.dys[i]);
    }
    tr.steps += more.steps;
    tr.rhs_evals += more.rhs_evals;
  }
  out.tail = classify_tail(tr);
  out.trajectory = std::move(tr);
  return out;
}

/// xi at which theta crosses pi/2 (for aligning orbits with the translation symmetry fixed).
inline double theta_midpoint(const Trajectory& tr) {
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    const double a = tr.ys[i][0] - kPi / 2.0;
    const double b = tr.ys[i + 1][0] - kPi / 2.0;
    if (a <= 0.0 && b > 0.0) {
      auto f = [&](double xi) { return tr.at(xi)[0] - kPi / 2.0; };
      boost::uintmax_t iters = 100;
      const auto root = boost::math::tools::toms748_solve(f, tr.xs[i], tr.xs[i + 1], a, b,
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
      return 0.5 * (root.first + root.second);
    }
  }
  throw NoConnection("theta_midpoint: trajectory never crosses pi/2");
}

}  // namespace llgs
