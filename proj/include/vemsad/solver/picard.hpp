#pragma once

#include <sstream>
#include <vector>

#include "vemsad/solver/norms.hpp"

namespace vemsad::solver {

struct PicardOptions {
  double tol = 1e-8;
  int max_iter = 30;
  double initial_concentration = 0.0;  // phi_0 = this constant on every element
  bool relative = false;               // divide the stopping norm by the current solution norm
  bool throw_on_failure = true;
};

struct CoupledSolution {
  Eigen::VectorXd u, p, flux, phi;
  std::vector<double> history;  // stopping norm per sweep after the first
  int sweeps = 0;               // elasticity + diffusion solve pairs
  int iterations = 0;           // loop counter at exit: sweeps after the first
  bool converged = false;
  double max_residual = 0.0;    // worst relative residual of the linear solves
  CoefficientSamples coefficient;

  /// Pi^eps u_h on element e.
  Eigen::VectorXd projected_displacement(const Discretization& d, const GlobalDoFMap& map, int e) const {
    return d.elastic[e].pi_eps() * gather(map.u[e], u);
  }
  /// Pi^0 zeta_h on element e.
  Eigen::VectorXd projected_flux(const Discretization& d, const GlobalDoFMap& map, int e) const {
    return d.transport[e].pi0() * gather(map.flux[e], flux);
  }
};

struct CoupledProblem {
  constitutive::PhysicalParams params;
  constitutive::DiffusionLaw diffusion_law = constitutive::ExponentialLaw{};
  constitutive::ActiveStressLaw active_law = constitutive::HillLaw{};
  ElasticityData elasticity;
  DiffusionData diffusion;
  BoundaryRoles roles;
};

inline Eigen::VectorXd constant_concentration(const Discretization& d, const GlobalDoFMap& map, double c) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(map.n_phi);
  if (c != 0.0)
    for (std::size_t e = 0; e < d.mesh->num_elements(); ++e) phi(map.phi[e].index[0]) = c;
  return phi;
}

/// Alternates the elasticity and diffusion solves until successive iterates
/// agree in the weighted norms.
inline CoupledSolution picard_iterate(const Discretization& d, const GlobalDoFMap& map, const CoupledProblem& prob,
                                      const PicardOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw Error(ErrorCategory::Config, "picard tolerance must be positive");
  if (opt.max_iter < 1) throw Error(ErrorCategory::Config, "picard max_iter must be >= 1");
  CoupledSolution s;
  s.phi = constant_concentration(d, map, opt.initial_concentration);
  for (int i = 0; i < opt.max_iter; ++i) {
    SolveResult el = solve_saddle(assemble_elasticity(d, map, prob.params, prob.active_law, s.phi, prob.elasticity, prob.roles));
    CoefficientSamples K = coefficient_samples(d, prob.diffusion_law,
                                               discrete_stress(d, map, el.primal, el.dual, prob.params.mu));
    SolveResult df = solve_saddle(assemble_diffusion(d, map, prob.params, K, prob.diffusion, prob.roles));
    s.max_residual = std::max({s.max_residual, el.relative_residual, df.relative_residual});
    s.sweeps = i + 1;
    s.iterations = i;
    double err = 0.0;
    if (i > 0) {
      NormComponents diff = discrete_norms(d, map, prob.params, el.primal - s.u, el.dual - s.p, df.primal - s.flux,
                                           df.dual - s.phi, K);
      err = diff.total();
      if (opt.relative) {
        double ref = discrete_norms(d, map, prob.params, el.primal, el.dual, df.primal, df.dual, K).total();
        if (ref > 0.0) err /= ref;
      }
      s.history.push_back(err);
    }
    s.u = std::move(el.primal);
    s.p = std::move(el.dual);
    s.flux = std::move(df.primal);
    s.phi = std::move(df.dual);
    s.coefficient = std::move(K);
    if (i > 0 && err < opt.tol) {
      s.converged = true;
      return s;
    }
  }
  if (opt.throw_on_failure) {
    std::ostringstream os;
    os << "fixed point did not converge in " << opt.max_iter << " sweeps; history:";
    for (double h : s.history) os << ' ' << h;
    os << " (reduce the data or the coupling strength)";
    throw Error(ErrorCategory::Convergence, os.str());
  }
  return s;
}

}  // namespace vemsad::solver
