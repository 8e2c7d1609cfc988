#pragma once

#include <cmath>
#include <vector>

#include "vemsad/solver/assembly.hpp"

namespace vemsad::solver {

/// Squared weighted norms of the four fields.
struct NormComponents {
  double displacement = 0.0;   // 2 mu |eps(u)|^2
  double pressure = 0.0;       // (1/(2 mu) + 1/lambda) |p|^2
  double flux = 0.0;           // int K zeta . zeta + M |div zeta|^2
  double concentration = 0.0;  // (1/M + theta) |phi|^2

  double elasticity() const { return displacement + pressure; }
  double diffusion() const { return flux + concentration; }
  double total() const { return std::sqrt(elasticity() + diffusion()); }
};

/// Weighted norms of discrete fields: the displacement through Pi^eps, the
/// flux through Pi^0 with its exactly recovered divergence.
inline NormComponents discrete_norms(const Discretization& d, const GlobalDoFMap& map,
                                     const constitutive::PhysicalParams& params, const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& p, const Eigen::VectorXd& flux, const Eigen::VectorXd& phi,
                                     const CoefficientSamples& K) {
  NormComponents n;
  const double wp = 1.0 / (2.0 * params.mu) + 1.0 / params.lambda;
  const double wphi = 1.0 / params.M_bound + params.theta;
  for (std::size_t i = 0; i < d.mesh->num_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto& ee = d.elastic[e];
    const auto& te = d.transport[e];
    if (u.size() > 0) {
      Eigen::VectorXd c = ee.pi_eps() * gather(map.u[e], u);
      n.displacement += 2.0 * params.mu * c.dot(ee.energy_gram() * c);
    }
    if (p.size() > 0) {
      Eigen::VectorXd c = gather(map.p[e], p);
      n.pressure += wp * c.dot(ee.pressure_mass() * c);
    }
    if (flux.size() > 0) {
      Eigen::VectorXd dofs = gather(map.flux[e], flux);
      Eigen::VectorXd c = te.pi0() * dofs;
      Eigen::VectorXd dv = te.divergence() * dofs;
      n.flux += c.dot(te.weighted_gram(K[e]) * c) + params.M_bound * dv.dot(te.mass() * dv);
    }
    if (phi.size() > 0) {
      Eigen::VectorXd c = gather(map.phi[e], phi);
      n.concentration += wphi * c.dot(te.mass() * c);
    }
  }
  return n;
}

}  // namespace vemsad::solver
