#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "llgs/llgs.hpp"

using namespace llgs;

namespace {

const MaterialParams kCenter{0.5, 0.1, -1.0, 10.2, 0.0};
const WaveFrame kCenterFrame{4.0, 8.2};
const MaterialParams kFast{0.5, 0.1, -1.0, 50.0, 0.0};
const WaveFrame kFastFrame{19.92, 40.04};

void expect_cnear(cplx a, cplx b, double tol) {
  EXPECT_NEAR(a.real(), b.real(), tol);
  EXPECT_NEAR(a.imag(), b.imag(), tol);
}

}  // namespace

TEST(Analytic, PiChartCoefficientsAtCenter) {
  const ChartCoefficients c = chart_coefficients(ChartId::pi(), kCenter, kCenterFrame);
  EXPECT_EQ(c.A, 1.0);
  expect_cnear(c.B, {-2.0, -4.0}, 1e-14);
  expect_cnear(c.C, {1.0, 4.0}, 1e-14);
  expect_cnear(c.gamma, {4.0, 0.0}, 1e-14);
}

TEST(Analytic, FixedChartMidpointHasNoQuadraticTerm) {
  EXPECT_NEAR(chart_coefficients(ChartId::fixed(kPi / 2.0), kCenter, kCenterFrame).A, 0.0, 1e-16);
  EXPECT_THROW(ChartId::fixed(0.0), DomainError);
}

TEST(Analytic, DoubleCenterGammas) {
  const MaterialParams mp{0.5, 0.1, -1.0, 10.0, -0.99};
  const WaveFrame wf{std::sqrt(3960.0 / 199.0), 2000.0 / 199.0};
  const cplx g0 = chart_coefficients(ChartId::zero(), mp, wf).gamma;
  const cplx gp = chart_coefficients(ChartId::pi(), mp, wf).gamma;
  EXPECT_NEAR(g0.real(), 3.33551, 5e-5);
  EXPECT_NEAR(gp.real(), 3.27469, 5e-5);
  EXPECT_NEAR(g0.imag(), 0.0, 1e-9);
  EXPECT_NEAR(gp.imag(), 0.0, 1e-9);
}

TEST(Analytic, EquilibriaAtCenter) {
  const auto [z0p, z0m] = chart_equilibria(ChartId::zero(), kCenter, kCenterFrame);
  const auto [zpp, zpm] = chart_equilibria(ChartId::pi(), kCenter, kCenterFrame);
  expect_cnear(z0p.z, {-3.0, -4.0}, 1e-10);
  expect_cnear(zpp.z, {1.0, 4.0}, 1e-10);
  expect_cnear(zpm.z, {1.0, 0.0}, 1e-10);
  (void)z0m;
}

TEST(Analytic, EquilibriaAtLargeField) {
  expect_cnear(chart_equilibria(ChartId::zero(), kFast, kFastFrame).first.z, {-10.96, -19.92}, 1e-10);
  expect_cnear(chart_equilibria(ChartId::pi(), kFast, kFastFrame).first.z, {8.96, 19.92}, 1e-10);
}

TEST(AnalyticProperty, EquilibriaAreZerosAndSatisfyVieta) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const MaterialParams mp{0.1 + std::abs(u(gen)), std::abs(u(gen)), -0.2 - std::abs(u(gen)), 5.0 * u(gen),
                            0.45 * u(gen)};
    const WaveFrame wf{2.0 * u(gen), 3.0 * u(gen)};
    for (ChartId ch : {ChartId::zero(), ChartId::pi()}) {
      const ChartCoefficients c = chart_coefficients(ch, mp, wf);
      const auto [a, b] = chart_equilibria(ch, mp, wf);
      const double scale = 1.0 + std::norm(a.z) + std::norm(b.z) + std::abs(c.C);
      for (const auto& e : {a, b}) {
        const ChartState d = desingularized_rhs(e.state(), mp, wf);
        EXPECT_LT(std::abs(d.theta), 1e-13 * scale);
        EXPECT_LT(std::abs(d.p), 1e-13 * scale);
        EXPECT_LT(std::abs(d.q), 1e-13 * scale);
      }
      expect_cnear(a.z + b.z, -c.B / c.A, 1e-12 * scale);
      expect_cnear(a.z * b.z, c.C / c.A, 1e-12 * scale);
    }
  }
}

TEST(Analytic, InChartEigenvaluesAreFieldDerivative) {
  for (ChartId ch : {ChartId::zero(), ChartId::pi()}) {
    const ChartCoefficients c = chart_coefficients(ch, kFast, kFastFrame);
    const auto pr = chart_equilibria(ch, kFast, kFastFrame);
    for (const auto& e : {pr.first, pr.second}) {
      expect_cnear(e.eigenvalues[0], 2.0 * c.A * e.z + c.B, 1e-10);
      expect_cnear(e.eigenvalues[1], std::conj(e.eigenvalues[0]), 0.0);
    }
  }
}

TEST(Analytic, ChartFlowRejectsEquilibrium) {
  const ChartCoefficients c = chart_coefficients(ChartId::pi(), kCenter, kCenterFrame);
  EXPECT_THROW(chart_flow(cplx(1.0, 0.0), 0.0, 3.0, c), EquilibriumInput);
}

TEST(AnalyticProperty, ChartFlowSolvesRiccati) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const MaterialParams mp{0.3 + std::abs(u(gen)), std::abs(u(gen)), -0.5 - std::abs(u(gen)), 3.0 * u(gen), 0.5 * u(gen)};
    const WaveFrame wf{u(gen), u(gen)};
    const ChartId ch = i % 3 == 0 ? ChartId::zero() : (i % 3 == 1 ? ChartId::pi() : ChartId::fixed(kPi / 2.0));
    const ChartCoefficients c = chart_coefficients(ch, mp, wf);
    const cplx z0(u(gen), u(gen));
    try {
      const double xi = 0.3 * u(gen), h = 1e-5;
      const cplx z = chart_flow(z0, 0.0, xi, c);
      const cplx dz = (chart_flow(z0, 0.0, xi + h, c) - chart_flow(z0, 0.0, xi - h, c)) / (2.0 * h);
      EXPECT_LT(std::abs(dz - c.field(z)), 1e-6 * (1.0 + std::abs(c.field(z))));
      expect_cnear(chart_flow(z0, 0.0, 0.0, c), z0, 1e-12);
    } catch (const PoleCrossing&) {
    }
  }
}

TEST(Analytic, ChartFlowMatchesIntegrationOnCenterOrbit) {
  const ChartCoefficients c = chart_coefficients(ChartId::pi(), kCenter, kCenterFrame);
  IntegrateOptions io;
  io.tol = 1e-12;
  const Trajectory tr = integrate(ChartState{kPi, 1.75, 0.0}, 0.0, 10.0, kCenter, kCenterFrame, io);
  double worst = 0.0;
  for (double xi = 0.0; xi <= 10.0; xi += 0.25) {
    const cplx z = chart_flow(cplx(1.75, 0.0), 0.0, xi, c);
    const Eigen::Vector3d y = tr.at(xi);
    worst = std::max(worst, std::abs(z - cplx(y[1], y[2])) / std::abs(z));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Analytic, ChartFlowLimitsAreEquilibria) {
  const MaterialParams mp{0.5, 0.1, -1.0, 0.5, 0.0};
  const WaveFrame wf = homogeneous_speed_frequency(mp);
  const ChartCoefficients c = chart_coefficients(ChartId::zero(), mp, wf);
  const auto [a, b] = chart_equilibria(ChartId::zero(), mp, wf);
  const cplx z0(0.2, 0.1);
  const cplx fwd = chart_flow(z0, 0.0, 60.0, c), bwd = chart_flow(z0, 0.0, -60.0, c);
  auto dist = [&](cplx z) { return std::min(std::abs(z - a.z), std::abs(z - b.z)); };
  EXPECT_LT(dist(fwd), 1e-8);
  EXPECT_LT(dist(bwd), 1e-8);
  EXPECT_GT(std::abs(fwd - bwd), 0.1);
}

TEST(Analytic, HomogeneousSpeedFrequency) {
  WaveFrame f = homogeneous_speed_frequency(kFast);
  EXPECT_NEAR(f.s, 19.92, 1e-12);
  EXPECT_NEAR(f.omega, 40.04, 1e-12);
  f = homogeneous_speed_frequency(kCenter);
  EXPECT_NEAR(f.s, 4.0, 1e-12);
  EXPECT_NEAR(f.omega, 8.2, 1e-12);
  f = homogeneous_speed_frequency(kCenter.with_h(0.2));
  EXPECT_NEAR(f.s, 0.0, 1e-15);
  EXPECT_NEAR(f.omega, 0.2, 1e-15);
  EXPECT_THROW(homogeneous_speed_frequency(kCenter.with_c_cp(0.1)), DomainError);
}

TEST(Analytic, HomogeneousProfileShape) {
  const ChartState m = homogeneous_profile(0.0, -1.0, 1);
  EXPECT_NEAR(m.theta, kPi / 2.0, 1e-15);
  EXPECT_EQ(m.p, 1.0);
  EXPECT_EQ(m.q, 0.0);
  EXPECT_NEAR(homogeneous_profile(40.0, -1.0, 1).theta, kPi, 1e-15);
  EXPECT_NEAR(homogeneous_profile(-40.0, -1.0, 1).theta, 0.0, 1e-15);
  EXPECT_THROW(homogeneous_profile(0.0, 1.0, 1), DomainError);
}

TEST(AnalyticProperty, HomogeneousProfileSolvesSystem) {
  for (double h : {0.2, 0.5, 4.0, 10.2, 50.0}) {
    const MaterialParams mp = kCenter.with_h(h);
    const WaveFrame wf = homogeneous_speed_frequency(mp);
    double worst = 0.0;
    for (double xi = -20.0; xi <= 20.0; xi += 0.01) {
      const ChartState s = homogeneous_profile(xi, mp.mu, 1);
      const ChartState d = desingularized_rhs(s, mp, wf);
      worst = std::max({worst, std::abs(d.theta - homogeneous_profile_slope(xi, mp.mu, 1)), std::abs(d.p),
                        std::abs(d.q)});
    }
    EXPECT_LT(worst, 1e-12) << "h = " << h;
  }
}
