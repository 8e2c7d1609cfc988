#pragma once

#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "vemsad/bench/export.hpp"
#include "vemsad/mesh/generators.hpp"

namespace vemsad::bench {

struct LithiationConfig {
  mesh::AnnulusOptions annulus{.rho_i = 1.0, .rho_o = 5.0, .n_seeds = 1000, .rng_seed = 1, .lloyd_iterations = 10};
  double youngs = 1e-2;
  double poisson = 0.3;
  double m0 = 1e2;
  double m1_coupled = 1e3;
  double molar_volume = 3.497e12;
  double phi_max = 2.29e-14;
  double traction = -2e-4;  // normal load on the outer circle in the loaded runs
  double theta = 1.0;
  double M_bound = 1.0;
  int k1 = 2;
  int k2 = 1;
  int samples = 101;
  double ray_angle = 0.3;
  solver::PicardOptions picard{.tol = 1e-8, .max_iter = 50, .relative = true};

  double lambda() const { return youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)); }
  double mu() const { return youngs / (2.0 * (1.0 + poisson)); }
  double K0() const { return molar_volume * (2.0 * mu() + 3.0 * lambda()) / 3.0; }
};

struct LithiationRun {
  std::string label;
  double m1 = 0.0;
  double traction = 0.0;
  solver::CoupledSolution solution;
  std::vector<double> concentration;  // along the ray
  std::vector<double> pressure;       // per element at the centroid
};

struct LithiationResult {
  std::vector<double> rho;
  std::vector<LithiationRun> runs;  // decoupled/coupled x unloaded/loaded
  double boundary_concentration_error = 0.0;  // worst |phi_h - phi_max| / phi_max at outer edge midpoints

  const LithiationRun& run(double m1, double traction) const {
    for (const auto& r : runs)
      if (r.m1 == m1 && r.traction == traction) return r;
    throw Error(ErrorCategory::Config, "no lithiation run with these settings");
  }
};

/// Largest |a-b| / max|b| over paired samples.
inline double max_relative_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0, gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    gap = std::max(gap, std::abs(a[i] - b[i]));
  }
  return scale > 0.0 ? gap / scale : gap;
}

inline double max_abs_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

namespace detail {

// boundary chords cut inside the circles; pull samples in until they hit an element
inline int locate_on_ray(const mesh::PolygonalMesh& m, double r, const Point& dir, double ri, double ro) {
  const double mid = 0.5 * (ri + ro);
  for (int k = 0; k < 200; ++k) {
    double rr = r + (mid - r) * 0.005 * k;
    int e = m.locate(rr * dir);
    if (e >= 0) return e;
  }
  throw Error(ErrorCategory::Mesh, "radial sample outside the annulus mesh");
}

}  // namespace detail

/// Solves the perforated particle for m1 in {0, m1_coupled} and both outer
/// loads. With `vtk_dir` set, writes one VTK file per run.
inline LithiationResult run_lithiation(const LithiationConfig& cfg, const std::filesystem::path& vtk_dir = {}) {
  if (cfg.samples < 2) throw Error(ErrorCategory::Config, "lithiation needs at least two radial samples");
  auto m = mesh::generate_annulus_mesh(cfg.annulus);
  auto d = solver::Discretization::build(m, cfg.k1, cfg.k2);
  auto map = solver::GlobalDoFMap::build(d);
  const double ri = cfg.annulus.rho_i, ro = cfg.annulus.rho_o;
  const Point dir(std::cos(cfg.ray_angle), std::sin(cfg.ray_angle));

  LithiationResult res;
  std::vector<int> owner;
  for (int j = 0; j < cfg.samples; ++j) {
    double r = ri + (ro - ri) * j / (cfg.samples - 1);
    res.rho.push_back(r);
    owner.push_back(detail::locate_on_ray(m, r, dir, ri, ro));
  }

  for (double m1 : {0.0, cfg.m1_coupled})
    for (double t : {0.0, cfg.traction}) {
      LithiationRun run;
      run.m1 = m1;
      run.traction = t;
      run.label = std::string(m1 == 0.0 ? "decoupled" : "coupled") + (t == 0.0 ? "_free" : "_loaded");
      solver::CoupledProblem prob;
      prob.params = {.lambda = cfg.lambda(), .mu = cfg.mu(), .theta = cfg.theta, .M_bound = cfg.M_bound};
      prob.diffusion_law = constitutive::QuadraticLaw{cfg.m0, m1};
      prob.active_law = constitutive::LinearLaw{cfg.K0()};
      prob.elasticity.traction = [t](const Point&, const Point& n) { return Point(t * n); };
      const double phi_d = cfg.phi_max;
      prob.diffusion.concentration = [phi_d](const Point&) { return phi_d; };
      try {
        run.solution = solver::picard_iterate(d, map, prob, cfg.picard);
      } catch (const Error& e) {
        throw Error(e.category(), "lithiation " + run.label + ": " + e.what());
      }
      for (int j = 0; j < cfg.samples; ++j) {
        const auto& te = d.transport[owner[j]];
        run.concentration.push_back(te.basis().value(solver::gather(map.phi[owner[j]], run.solution.phi), res.rho[j] * dir));
      }
      for (const auto& e : m.edges()) {
        if (!e.is_boundary() || *e.tag != mesh::BoundaryTag::Outer) continue;
        const int el = e.elements[0];
        Point mid = 0.5 * (m.vertices()[e.vertices[0]] + m.vertices()[e.vertices[1]]);
        double v = d.transport[el].basis().value(solver::gather(map.phi[el], run.solution.phi), mid);
        res.boundary_concentration_error = std::max(res.boundary_concentration_error, std::abs(v - phi_d) / phi_d);
      }
      run.pressure = element_fields(d, map, run.solution).pressure;
      if (!vtk_dir.empty()) {
        std::filesystem::create_directories(vtk_dir);
        export_vtk(d, map, run.solution, vtk_dir / ("lithiation_" + run.label + ".vtk"), "lithiation " + run.label);
      }
      res.runs.push_back(std::move(run));
    }
  return res;
}

/// rho followed by one concentration column per run.
inline void write_profile_csv(std::ostream& os, const LithiationResult& r) {
  os << "rho";
  for (const auto& run : r.runs) os << ',' << run.label;
  os << '\n' << std::setprecision(10);
  for (std::size_t j = 0; j < r.rho.size(); ++j) {
    os << r.rho[j];
    for (const auto& run : r.runs) os << ',' << run.concentration[j];
    os << '\n';
  }
  os << std::defaultfloat;
}

}  // namespace vemsad::bench
