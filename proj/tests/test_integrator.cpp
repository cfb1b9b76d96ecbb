#include <cmath>

#include <gtest/gtest.h>

#include "llgs/llgs.hpp"

using namespace llgs;

namespace {
const MaterialParams kCenter{0.5, 0.1, -1.0, 10.2, 0.0};
const WaveFrame kCenterFrame{4.0, 8.2};

double sup_error_vs_wall(const Trajectory& tr, double mu, double shift) {
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const ChartState a = homogeneous_profile(tr.xs[i] - shift, mu, 1);
    worst = std::max({worst, std::abs(tr.ys[i][0] - a.theta), std::abs(tr.ys[i][1] - a.p), std::abs(tr.ys[i][2] - a.q)});
  }
  return worst;
}
}  // namespace

TEST(Integrator, EquilibriumStaysPut) {
  const MaterialParams mp = kCenter.with_h(0.5);
  const WaveFrame wf = homogeneous_speed_frequency(mp);
  IntegrateOptions io;
  // the theta = 0 end of the wall: stable inside its chart, and the chart itself is exact
  const Trajectory tr = integrate(ChartState{0.0, 1.0, 0.0}, 0.0, 50.0, mp, wf, io);
  double drift = 0.0;
  for (const auto& y : tr.ys) drift = std::max(drift, (y - Eigen::Vector3d(0.0, 1.0, 0.0)).norm());
  EXPECT_LT(drift, 10.0 * io.tol);
}

// The seed at xi = -20 has theta ~ 4e-9, so the absolute tolerance shows up as a small
// xi-shift; errors are measured after aligning the theta = pi/2 crossing.
TEST(Integrator, ReproducesWallProfile) {
  for (auto [h, xi1] : {std::pair{0.5, 2.0}, {10.2, 20.0}, {20.0, 20.0}, {50.0, 20.0}}) {
    const MaterialParams mp = kCenter.with_h(h);
    const WaveFrame wf = homogeneous_speed_frequency(mp);
    IntegrateOptions io;
    io.tol = 1e-12;
    const Trajectory tr = integrate(homogeneous_profile(-20.0, -1.0, 1), -20.0, xi1, mp, wf, io);
    const double shift = theta_midpoint(tr);
    EXPECT_LT(std::abs(shift), 1e-4) << h;
    EXPECT_LT(sup_error_vs_wall(tr, -1.0, shift), 1e-8) << h;
  }
}

TEST(Integrator, BackwardIntegration) {
  const MaterialParams mp = kCenter.with_h(0.5);
  const WaveFrame wf = homogeneous_speed_frequency(mp);
  IntegrateOptions io;
  io.tol = 1e-12;
  const Trajectory tr = integrate(homogeneous_profile(10.0, -1.0, 1), 10.0, -10.0, mp, wf, io);
  EXPECT_EQ(tr.xs.front(), -10.0);
  EXPECT_LT(sup_error_vs_wall(tr, -1.0, 0.0), 1e-8);
}

TEST(Integrator, SingularMatchesDesingularizedInterior) {
  const MaterialParams mp = kCenter.with_h(3.0);
  const WaveFrame wf = homogeneous_speed_frequency(mp);
  IntegrateOptions io;
  io.tol = 1e-12;
  const ChartState s0 = homogeneous_profile(-3.0, -1.0, 1);
  const Trajectory a = integrate(s0, -3.0, 3.0, mp, wf, io);
  const SingularState g = to_singular(s0);
  const Trajectory b = integrate(RhsKind::Singular, {g.theta, g.psi, g.q}, -3.0, 3.0, mp, wf, io);
  EXPECT_NEAR(a.back()[0], b.back()[0], 1e-9);
  EXPECT_NEAR(a.back()[1] * std::sin(a.back()[0]), b.back()[1], 1e-9);
}

TEST(Integrator, ClosedOrbitOnCenterChart) {
  IntegrateOptions io;
  io.tol = 1e-12;
  // return to the starting section q = 0, crossed with q decreasing
  io.events.push_back({[](double, const Eigen::Vector3d& y) { return y[2]; }, -1, false});
  const Trajectory tr = integrate(ChartState{kPi, 1.75, 0.0}, 0.0, 20.0, kCenter, kCenterFrame, io);
  // the first crossing away from xi = 0
  const EventHit* first = nullptr;
  for (const auto& e : tr.events)
    if (e.xi > 1e-3) {
      first = &e;
      break;
    }
  ASSERT_NE(first, nullptr);
  const Eigen::Vector3d y = tr.at(first->xi);
  EXPECT_LT(std::hypot(y[1] - 1.75, y[2]), 1e-6);
}

TEST(Integrator, InvalidInputs) {
  IntegrateOptions io;
  io.tol = 1e-2;
  EXPECT_THROW(integrate(ChartState{1.0, 0.0, 0.0}, 0.0, 1.0, kCenter, kCenterFrame, io), DomainError);
  EXPECT_THROW(integrate(ChartState{-1e-6, 1.0, 0.0}, 0.0, 1.0, kCenter, kCenterFrame), DomainError);
}

TEST(Integrator, SeedAlongTransverseDirection) {
  const MaterialParams mp = kCenter.with_h(0.5);
  const WaveFrame wf = homogeneous_speed_frequency(mp);
  const ChartEquilibrium src = source_equilibrium(mp, wf);
  EXPECT_NEAR(src.eigenvalues[2].real(), 1.0, 1e-12);
  const ChartState seed = unstable_seed(src, 1e-6);
  EXPECT_EQ(seed.theta, 1e-6);
  EXPECT_NEAR(seed.p, 1.0, 1e-12);
  // negative epsilon points out of the cylinder
  EXPECT_THROW(integrate(unstable_seed(src, -1e-6), 0.0, 1.0, mp, wf), DomainError);
}

TEST(Integrator, LargeFieldShotIsFlat) {
  const MaterialParams mp = kCenter.with_h(50.0);
  const WaveFrame wf = homogeneous_speed_frequency(mp);
  const ShootResult r = shoot_to_pi_chart(mp, wf);
  EXPECT_EQ(r.tail.kind, Flatness::Flat);
  const Eigen::Vector3d end = r.trajectory.back();
  const cplx zm = chart_equilibria(ChartId::pi(), mp, wf).second.z;
  EXPECT_LT(std::hypot(end[1] - zm.real(), end[2] - zm.imag()), 1e-4);
}

TEST(IntegratorProperty, ShootingReproducesWallFamily) {
  const double hi = thresholds(0.5, 0.1, -1.0).second;
  for (int k = 1; k <= 10; ++k) {
    const double h = 0.2 + (hi - 0.2) * double(k) / 11.0;
    const MaterialParams mp = kCenter.with_h(h);
    const WaveFrame wf = homogeneous_speed_frequency(mp);
    const ShootResult r = shoot_to_pi_chart(mp, wf);
    const double shift = theta_midpoint(r.trajectory);
    // compare away from the seed where the epsilon offset itself dominates
    const Trajectory& tr = r.trajectory;
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr.ys[i][0] < 1e-3) continue;
      const ChartState a = homogeneous_profile(tr.xs[i] - shift, -1.0, 1);
      worst = std::max({worst, std::abs(tr.ys[i][0] - a.theta), std::abs(tr.ys[i][1] - a.p), std::abs(tr.ys[i][2] - a.q)});
    }
    EXPECT_LT(worst, 1e-6) << "h = " << h;
  }
}

TEST(Integrator, DetunedCenterShotIsNonFlat) {
  const double ds = 0.1;
  const WaveFrame wf{4.0 + ds, center_frequency(ChartId::pi(), kCenter, 4.0 + ds)};
  ShootOptions so;
  so.tail_extension = 60.0;
  const ShootResult r = shoot_to_pi_chart(kCenter, wf, so);
  EXPECT_EQ(r.tail.kind, Flatness::NonFlat);
  const double predicted = tail_oscillation_coefficients(ds, 0.0, 0.5, -1.0).norm();
  EXPECT_GT(r.tail.oscillation_amplitude, 0.01 * predicted);
  EXPECT_LT(r.tail.oscillation_amplitude, 100.0 * predicted);
}
