#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "llgs/classification.hpp"
#include "llgs/model.hpp"

namespace llgs {

/// Discretized heteroclinic orbit: nodal states on a mesh of [-L, L].
struct Profile {
  std::vector<double> mesh;
  std::vector<ChartState> states;
  MaterialParams mp;
  WaveFrame wf;
  RegimeKind regime = RegimeKind::Codim2;
  double htilde = 0.0;  // energy gap at the right end; only meaningful for center-case builds
  // collocation stage slopes, interval-major; optional, lets a stored solution re-seed Newton exactly
  std::vector<Eigen::Vector3d> stage_slopes;

  std::size_t size() const { return mesh.size(); }
  const ChartState& left() const { return states.front(); }
  const ChartState& right() const { return states.back(); }

  /// Piecewise cubic Hermite interpolation using the vector field for nodal slopes.
  ChartState at(double xi) const {
    if (mesh.size() < 2) throw DomainError("Profile::at on an empty profile");
    if (xi <= mesh.front()) return states.front();
    if (xi >= mesh.back()) return states.back();
    const auto it = std::upper_bound(mesh.begin(), mesh.end(), xi);
    const std::size_t j = std::size_t(it - mesh.begin()) - 1;
    const double h = mesh[j + 1] - mesh[j];
    const double t = (xi - mesh[j]) / h;
    const Eigen::Vector3d y0(states[j].theta, states[j].p, states[j].q);
    const Eigen::Vector3d y1(states[j + 1].theta, states[j + 1].p, states[j + 1].q);
    const Eigen::Vector3d d0 = detail::rhs(y0, mp, wf) * h;
    const Eigen::Vector3d d1 = detail::rhs(y1, mp, wf) * h;
    const double t2 = t * t, t3 = t2 * t;
    const Eigen::Vector3d y = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 +
                              (t3 - t2) * d1;
    return {y[0], y[1], y[2]};
  }
};

/// Homogeneous wall sampled on a uniform mesh of [-L, L].
inline Profile homogeneous_seed(const MaterialParams& mp, double L, std::size_t n_mesh) {
  Profile pr;
  pr.mp = mp;
  pr.wf = homogeneous_speed_frequency(mp);
  pr.mesh.resize(n_mesh + 1);
  pr.states.resize(n_mesh + 1);
  for (std::size_t i = 0; i <= n_mesh; ++i) {
    pr.mesh[i] = -L + 2.0 * L * double(i) / double(n_mesh);
    pr.states[i] = homogeneous_profile(pr.mesh[i], mp.mu, 1);
  }
  if (mp.h >= mp.beta / mp.alpha) pr.regime = classify_regime(mp).kind;
  return pr;
}

}  // namespace llgs
