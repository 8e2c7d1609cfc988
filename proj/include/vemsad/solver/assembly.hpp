#pragma once

#include <array>
#include <functional>
#include <memory>
#include <sstream>

#include "vemsad/constitutive/laws.hpp"
#include "vemsad/solver/dof_map.hpp"
#include "vemsad/solver/saddle.hpp"

namespace vemsad::solver {

using Tensor = constitutive::Sym2<double>;
using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;
/// Boundary data that may depend on the outward normal.
using NormalVectorField = std::function<Point(const Point&, const Point&)>;
using NormalScalarField = std::function<double(const Point&, const Point&)>;
/// Stress (or any tensor) per element at a point.
using TensorField = std::function<Tensor(int, const Point&)>;

/// What each boundary tag means for the two sub-problems.
///
/// Displacement: fixed (essential) or traction (natural). Transport: normal
/// flux given (essential) or concentration given (natural, through F2).
struct BoundaryRoles {
  std::array<bool, 4> displacement_fixed{true, false, true, false};
  std::array<bool, 4> flux_fixed{false, true, true, false};

  bool fixed_u(BoundaryTag t) const { return displacement_fixed[static_cast<int>(t)]; }
  bool fixed_flux(BoundaryTag t) const { return flux_fixed[static_cast<int>(t)]; }
};

struct ElasticityData {
  VectorField body_force = [](const Point&) { return Point(0, 0); };
  VectorField displacement = [](const Point&) { return Point(0, 0); };
  NormalVectorField traction = [](const Point&, const Point&) { return Point(0, 0); };
};

struct DiffusionData {
  ScalarField source = [](const Point&) { return 0.0; };
  ScalarField concentration = [](const Point&) { return 0.0; };
  NormalScalarField normal_flux = [](const Point&, const Point&) { return 0.0; };
};

namespace detail {

inline void scatter(Triplets& t, const LocalMap& rows, const LocalMap& cols, const Eigen::MatrixXd& local) {
  for (int i = 0; i < local.rows(); ++i)
    for (int j = 0; j < local.cols(); ++j) {
      double v = rows.sign[i] * cols.sign[j] * local(i, j);
      if (v != 0.0) t.emplace_back(rows.index[i], cols.index[j], v);
    }
}

inline void scatter(Eigen::VectorXd& g, const LocalMap& rows, const Eigen::VectorXd& local) {
  for (int i = 0; i < local.size(); ++i) g(rows.index[i]) += rows.sign[i] * local(i);
}

inline SparseMatrix from_triplets(int r, int c, const Triplets& t) {
  SparseMatrix m(r, c);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

/// Local edge index of global edge `edge` inside element `e`.
inline int local_edge(const mesh::PolygonalMesh& m, int e, int edge) {
  const auto& el = m.element(e);
  for (std::size_t i = 0; i < el.edges.size(); ++i)
    if (el.edges[i] == edge) return static_cast<int>(i);
  throw Error(ErrorCategory::Mesh, "edge not found in its element");
}

}  // namespace detail

/// Element-wise active stress ell(phi_h), phi_h given by its coefficients.
inline ScalarField element_active_stress(const Discretization& d, const GlobalDoFMap& map,
                                         const constitutive::ActiveStressLaw& law, const Eigen::VectorXd& phi, int e) {
  Eigen::VectorXd c = gather(map.phi[e], phi);
  const auto* basis = &d.transport[e].basis();
  return [law, c, basis](const Point& x) { return constitutive::eval_ell(law, basis->value(c, x)); };
}

/// Elasticity block system with active stress computed from phi_h.
inline SaddleSystem assemble_elasticity(const Discretization& d, const GlobalDoFMap& map,
                                        const constitutive::PhysicalParams& params,
                                        const constitutive::ActiveStressLaw& ell_law, const Eigen::VectorXd& phi,
                                        const ElasticityData& data, const BoundaryRoles& roles = {}) {
  const auto& m = *d.mesh;
  const int nel = static_cast<int>(m.num_elements());
  Triplets ta, tb, tc;
  SaddleSystem s;
  s.c = 1.0 / params.lambda;
  s.F = Eigen::VectorXd::Zero(map.n_u);
  s.G = Eigen::VectorXd::Zero(map.n_p);
  for (int e = 0; e < nel; ++e) {
    const auto& el = d.elastic[e];
    detail::scatter(ta, map.u[e], map.u[e], el.stiffness(params.mu));
    detail::scatter(tb, map.u[e], map.p[e], el.coupling());
    detail::scatter(tc, map.p[e], map.p[e], el.pressure_mass());
    detail::scatter(s.F, map.u[e], el.load(data.body_force));
    if (phi.size() > 0) {
      detail::scatter(s.G, map.p[e], el.active_load(element_active_stress(d, map, ell_law, phi, e), params.lambda));
    } else {
      double l0 = constitutive::eval_ell(ell_law, 0.0);
      detail::scatter(s.G, map.p[e], el.active_load([l0](const Point&) { return l0; }, params.lambda));
    }
  }
  s.A = detail::from_triplets(map.n_u, map.n_u, ta);
  s.B = detail::from_triplets(map.n_u, map.n_p, tb);
  s.C = detail::from_triplets(map.n_p, map.n_p, tc);

  std::vector<char> fixed(map.n_u, 0);
  std::vector<double> value(map.n_u, 0.0);
  for (std::size_t i = 0; i < m.num_edges(); ++i) {
    const int edge = static_cast<int>(i);
    const auto& ed = m.edge(edge);
    if (!ed.is_boundary()) continue;
    const int e = ed.elements[0];
    const int le = detail::local_edge(m, e, edge);
    const auto& el = d.elastic[e];
    if (roles.fixed_u(*ed.tag)) {
      for (int j = 0; j <= d.k1; ++j) {
        // elements[0] traverses the edge in its global direction
        Point val = data.displacement(el.node_position(le, j));
        for (int c = 0; c < 2; ++c) {
          int gi = map.edge_node_u(m, d.k1, edge, j, c);
          fixed[gi] = 1;
          value[gi] = c == 0 ? val.x() : val.y();
        }
      }
    } else {
      Point n = m.edge_normal(edge);
      NormalVectorField t = data.traction;
      detail::scatter(s.F, map.u[e], el.traction(le, [&](const Point& x) { return t(x, n); }));
    }
  }
  for (int i = 0; i < map.n_u; ++i)
    if (fixed[i]) {
      s.fixed.push_back(i);
      s.fixed_values.push_back(value[i]);
    }
  return s;
}

/// Discrete stress 2 mu eps(Pi^eps u_h) - p_h I, per element.
inline TensorField discrete_stress(const Discretization& d, const GlobalDoFMap& map, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& p, double mu) {
  const int nel = static_cast<int>(d.mesh->num_elements());
  auto proj = std::make_shared<std::vector<Eigen::VectorXd>>(nel);
  auto pres = std::make_shared<std::vector<Eigen::VectorXd>>(nel);
  for (int e = 0; e < nel; ++e) {
    (*proj)[e] = d.elastic[e].pi_eps() * gather(map.u[e], u);
    (*pres)[e] = gather(map.p[e], p);
  }
  const Discretization* dp = &d;
  return [dp, proj, pres, mu](int e, const Point& x) {
    const auto& el = dp->elastic[e];
    return constitutive::reconstruct_stress(el.strain((*proj)[e], x), el.pressure_basis().value((*pres)[e], x), mu);
  };
}

/// Coefficient samples M^{-1}(stress) per element at the transport quadrature points.
using CoefficientSamples = std::vector<std::vector<Tensor>>;

inline CoefficientSamples coefficient_samples(const Discretization& d, const constitutive::DiffusionLaw& law,
                                              const TensorField& stress) {
  CoefficientSamples K(d.mesh->num_elements());
  for (std::size_t i = 0; i < K.size(); ++i) {
    const int e = static_cast<int>(i);
    for (const Point& x : d.transport[e].quadrature().points) {
      try {
        K[e].push_back(constitutive::eval_M_inverse(law, stress(e, x)));
      } catch (const Error& err) {
        std::ostringstream os;
        os << err.what() << " (element " << e << ", point " << x.x() << ", " << x.y() << ")";
        throw Error(err.category(), os.str());
      }
    }
  }
  return K;
}

inline CoefficientSamples identity_samples(const Discretization& d) {
  CoefficientSamples K(d.mesh->num_elements());
  for (std::size_t e = 0; e < K.size(); ++e) K[e].assign(d.transport[e].quadrature().size(), Tensor::identity());
  return K;
}

/// Diffusion block system for a sampled inverse diffusion tensor.
inline SaddleSystem assemble_diffusion(const Discretization& d, const GlobalDoFMap& map,
                                       const constitutive::PhysicalParams& params, const CoefficientSamples& coef,
                                       const DiffusionData& data, const BoundaryRoles& roles = {}) {
  const auto& m = *d.mesh;
  const int nel = static_cast<int>(m.num_elements());
  Triplets ta, tb, tc;
  SaddleSystem s;
  s.c = params.theta;
  s.F = Eigen::VectorXd::Zero(map.n_flux);
  s.G = Eigen::VectorXd::Zero(map.n_phi);
  for (int e = 0; e < nel; ++e) {
    const auto& el = d.transport[e];
    const auto& K = coef[e];
    detail::scatter(ta, map.flux[e], map.flux[e], el.stiffness(K));
    detail::scatter(tb, map.flux[e], map.phi[e], el.coupling());
    detail::scatter(tc, map.phi[e], map.phi[e], el.mass());
    detail::scatter(s.G, map.phi[e], el.source(data.source));
  }
  s.A = detail::from_triplets(map.n_flux, map.n_flux, ta);
  s.B = detail::from_triplets(map.n_flux, map.n_phi, tb);
  s.C = detail::from_triplets(map.n_phi, map.n_phi, tc);

  for (std::size_t i = 0; i < m.num_edges(); ++i) {
    const int edge = static_cast<int>(i);
    const auto& ed = m.edge(edge);
    if (!ed.is_boundary()) continue;
    const int e = ed.elements[0];
    const int le = detail::local_edge(m, e, edge);
    if (roles.fixed_flux(*ed.tag)) {
      Point n = m.edge_normal(edge);
      NormalScalarField fl = data.normal_flux;
      Eigen::VectorXd vals = diffusion::edge_projected_values(m.vertex(ed.vertices[0]), m.vertex(ed.vertices[1]), d.k2,
                                                              [&](const Point& x) { return fl(x, n); });
      for (int j = 0; j <= d.k2; ++j) {
        s.fixed.push_back(map.edge_flux(d.k2, edge, j));
        s.fixed_values.push_back(vals(j));
      }
    } else {
      detail::scatter(s.F, map.flux[e], d.transport[e].boundary_load(le, data.concentration));
    }
  }
  return s;
}

/// Diffusion block system with coefficient M^{-1}(stress).
inline SaddleSystem assemble_diffusion(const Discretization& d, const GlobalDoFMap& map,
                                       const constitutive::PhysicalParams& params,
                                       const constitutive::DiffusionLaw& law, const TensorField& stress,
                                       const DiffusionData& data, const BoundaryRoles& roles = {}) {
  return assemble_diffusion(d, map, params, coefficient_samples(d, law, stress), data, roles);
}

/// Residual of the b2 rows (discrete mass balance) for a solved diffusion system.
inline Eigen::VectorXd mass_balance_residual(const SaddleSystem& s, const Eigen::VectorXd& flux,
                                             const Eigen::VectorXd& phi) {
  return s.B.transpose() * flux - s.c * (s.C * phi) - s.G;
}

}  // namespace vemsad::solver
