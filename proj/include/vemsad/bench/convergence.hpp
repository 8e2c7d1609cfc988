#pragma once

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vemsad/bench/manufactured.hpp"

namespace vemsad::bench {

enum class MeshFamily { Square, Crossed, Nonconvex, Voronoi, PerturbedVoronoi };

inline std::string to_string(MeshFamily f) {
  switch (f) {
    case MeshFamily::Square: return "square";
    case MeshFamily::Crossed: return "crossed";
    case MeshFamily::Nonconvex: return "nonconvex";
    case MeshFamily::Voronoi: return "voronoi";
    case MeshFamily::PerturbedVoronoi: return "perturbed-voronoi";
  }
  return "unknown";
}

inline MeshFamily parse_family(const std::string& s) {
  for (MeshFamily f : {MeshFamily::Square, MeshFamily::Crossed, MeshFamily::Nonconvex, MeshFamily::Voronoi,
                       MeshFamily::PerturbedVoronoi})
    if (to_string(f) == s) return f;
  throw Error(ErrorCategory::Config, "unknown mesh family '" + s + "'");
}

/// Level n of a family on `dom`. Voronoi families use n*n seeds.
inline mesh::PolygonalMesh make_family_mesh(MeshFamily f, int n, const mesh::Rectangle& dom = {},
                                            std::uint64_t seed = 1) {
  switch (f) {
    case MeshFamily::Square: return mesh::generate_square_mesh(n, dom);
    case MeshFamily::Crossed: return mesh::generate_crossed_mesh(n, dom);
    case MeshFamily::Nonconvex: return mesh::generate_nonconvex_mesh(n, dom);
    case MeshFamily::Voronoi:
      return mesh::generate_voronoi_mesh({.n_seeds = n * n, .rng_seed = seed, .lloyd_iterations = 20}, dom);
    case MeshFamily::PerturbedVoronoi:
      return mesh::generate_voronoi_mesh(
          {.n_seeds = n * n, .rng_seed = seed, .lloyd_iterations = 20, .perturbation = 0.15}, dom);
  }
  throw Error(ErrorCategory::Config, "unknown mesh family");
}

/// The four weighted error components, squared.
using ErrorComponents = solver::NormComponents;

/// e* against the exact fields: Pi^eps u_h, p_h, Pi^0 zeta_h (with its
/// recovered divergence) and phi_h. The flux weight uses the exact stress.
inline ErrorComponents compute_total_error(const solver::Discretization& d, const solver::GlobalDoFMap& map,
                                           const solver::CoupledSolution& s, const ManufacturedCase& c,
                                           int quad_degree = -1) {
  ErrorComponents err;
  const auto& P = c.params;
  const double wp = 1.0 / (2.0 * P.mu) + 1.0 / P.lambda;
  const double wphi = 1.0 / P.M_bound + P.theta;
  const int qd = quad_degree > 0 ? quad_degree : 2 * std::max(d.k1, d.k2) + 6;
  for (std::size_t i = 0; i < d.mesh->num_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto& ee = d.elastic[e];
    const auto& te = d.transport[e];
    auto q = poly::polygon_quadrature(ee.geometry(), qd);
    Eigen::VectorXd uc = s.projected_displacement(d, map, e);
    Eigen::VectorXd pc = solver::gather(map.p[e], s.p);
    Eigen::VectorXd fdofs = solver::gather(map.flux[e], s.flux);
    Eigen::VectorXd zc = te.pi0() * fdofs;
    Eigen::VectorXd dz = te.divergence() * fdofs;
    Eigen::VectorXd phc = solver::gather(map.phi[e], s.phi);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const Point& x = q.points[k];
      const double w = q.weights[k];
      auto l = c.at(x);
      Tensor de = c.strain(x) - ee.strain(uc, x);
      err.displacement += w * 2.0 * P.mu * (de.xx * de.xx + 2.0 * de.xy * de.xy + de.yy * de.yy);
      double dp = c.p(x) - ee.pressure_basis().value(pc, x);
      err.pressure += w * wp * dp * dp;
      Point dzv = c.zeta(x) - te.eval_poly(zc, x);
      Tensor K = constitutive::eval_M_inverse(c.diffusion_law, c.sigma(x));
      err.flux += w * (K.xx * dzv.x() * dzv.x() + 2.0 * K.xy * dzv.x() * dzv.y() + K.yy * dzv.y() * dzv.y());
      double ddiv = c.div_zeta(x) - te.basis().value(dz, x);
      err.flux += w * P.M_bound * ddiv * ddiv;
      double dphi = value(l.phi) - te.basis().value(phc, x);
      err.concentration += w * wphi * dphi * dphi;
    }
  }
  return err;
}

/// r = log(e1/e0) / log(h1/h0)
inline double observed_rate(double e0, double e1, double h0, double h1) { return std::log(e1 / e0) / std::log(h1 / h0); }

struct ConvergenceRow {
  std::string mesh;
  int level = 0;  // refinement parameter n
  double h = 0.0;
  int dof = 0;
  double e_star = 0.0;
  double rate = std::nan("");
  int iters = 0;
  ErrorComponents components;
  double max_residual = 0.0;
};

struct ConvergenceConfig {
  MeshFamily family = MeshFamily::Square;
  std::vector<int> levels{8, 12, 16, 20};
  int k1 = 2;
  int k2 = 1;
  int quad_degree = -1;
  std::uint64_t seed = 1;
  solver::PicardOptions picard;
};

/// One refinement level; `out` receives the discrete solution when given.
inline ConvergenceRow run_level(const ManufacturedCase& c, const ConvergenceConfig& cfg, int n,
                                solver::CoupledSolution* out = nullptr) {
  auto m = make_family_mesh(cfg.family, n, c.domain, cfg.seed);
  auto d = solver::Discretization::build(m, cfg.k1, cfg.k2, cfg.quad_degree);
  auto map = solver::GlobalDoFMap::build(d);
  auto prob = c.problem();
  solver::CoupledSolution s;
  try {
    s = solver::picard_iterate(d, map, prob, cfg.picard);
  } catch (const Error& e) {
    std::ostringstream os;
    os << to_string(cfg.family) << " level " << n << ": " << e.what();
    throw Error(e.category(), os.str());
  }
  ConvergenceRow row;
  row.mesh = to_string(cfg.family);
  row.level = n;
  row.h = m.h();
  row.dof = map.total();
  row.components = compute_total_error(d, map, s, c);
  row.e_star = row.components.total();
  row.iters = s.iterations;
  row.max_residual = s.max_residual;
  if (out) *out = std::move(s);
  return row;
}

inline std::vector<ConvergenceRow> run_convergence(const ManufacturedCase& c, const ConvergenceConfig& cfg) {
  std::vector<ConvergenceRow> rows;
  for (int n : cfg.levels) {
    rows.push_back(run_level(c, cfg, n));
    if (rows.size() > 1) {
      auto& a = rows[rows.size() - 2];
      auto& b = rows.back();
      b.rate = observed_rate(a.e_star, b.e_star, a.h, b.h);
    }
  }
  return rows;
}

inline constexpr const char* kCsvHeader = "mesh,level,h,dof,e_star,rate,iters";

/// Rows in the stable CSV schema; the first rate of a table is left empty.
inline void write_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.mesh << ',' << r.level << ',' << std::setprecision(10) << r.h << ',' << r.dof << ','
       << std::setprecision(6) << std::scientific << r.e_star << std::defaultfloat << ',';
    if (std::isfinite(r.rate)) os << std::fixed << std::setprecision(4) << r.rate << std::defaultfloat;
    os << ',' << r.iters << '\n';
  }
}

/// Per-field components, squared norms.
inline void write_components_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "mesh,level,h,e_u,e_p,e_zeta,e_phi\n" << std::setprecision(6) << std::scientific;
  for (const auto& r : rows)
    os << r.mesh << ',' << r.level << ',' << r.h << ',' << std::sqrt(r.components.displacement) << ','
       << std::sqrt(r.components.pressure) << ',' << std::sqrt(r.components.flux) << ','
       << std::sqrt(r.components.concentration) << '\n';
  os << std::defaultfloat;
}

}  // namespace vemsad::bench
