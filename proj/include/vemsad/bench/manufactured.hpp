#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "vemsad/core/dual.hpp"
#include "vemsad/mesh/generators.hpp"
#include "vemsad/solver/picard.hpp"

namespace vemsad::bench {

using mesh::Point;
using Tensor = constitutive::Sym2<double>;
using DisplacementFn = std::function<std::array<Dual2, 2>(const Dual2&, const Dual2&)>;
using ConcentrationFn = std::function<Dual2(const Dual2&, const Dual2&)>;

/// Exact displacement and concentration; every other field and all data are
/// derived from them with forward-mode differentiation.
struct ManufacturedCase {
  std::string name;
  constitutive::PhysicalParams params;
  constitutive::DiffusionLaw diffusion_law = constitutive::ExponentialLaw{};
  constitutive::ActiveStressLaw active_law = constitutive::HillLaw{};
  mesh::Rectangle domain{};
  DisplacementFn displacement;
  ConcentrationFn concentration;

  struct Local {
    std::array<Dual2, 2> u;
    Dual2 phi;
  };
  Local at(const Point& x) const {
    Dual2 X = seed2(x.x(), 0), Y = seed2(x.y(), 1);
    return {displacement(X, Y), concentration(X, Y)};
  }

  Point u(const Point& x) const {
    auto l = at(x);
    return {value(l.u[0]), value(l.u[1])};
  }
  constitutive::Sym2<Dual1> strain_d(const Local& l) const {
    Dual1 a = partial(l.u[0], 0), b = partial(l.u[0], 1), c = partial(l.u[1], 0), d = partial(l.u[1], 1);
    return {a, (b + c) * 0.5, d};
  }
  Tensor strain(const Point& x) const { return value_of(strain_d(at(x))); }
  double div_u(const Point& x) const {
    auto l = at(x);
    return value(partial(l.u[0], 0) + partial(l.u[1], 1));
  }
  /// Herrmann pressure -lambda div u + ell(phi), with its gradient.
  Dual1 pressure_d(const Local& l) const {
    Dual1 div = partial(l.u[0], 0) + partial(l.u[1], 1);
    return div * (-params.lambda) + constitutive::eval_ell(active_law, l.phi.v);
  }
  double p(const Point& x) const { return value(pressure_d(at(x))); }
  constitutive::Sym2<Dual1> stress_d(const Local& l) const {
    return constitutive::reconstruct_stress(strain_d(l), pressure_d(l), params.mu);
  }
  Tensor sigma(const Point& x) const { return value_of(stress_d(at(x))); }
  /// -div sigma
  Point f(const Point& x) const {
    auto s = stress_d(at(x));
    return {-(s.xx.d[0] + s.xy.d[1]), -(s.xy.d[0] + s.yy.d[1])};
  }
  double phi(const Point& x) const { return value(at(x).phi); }
  Point grad_phi(const Point& x) const {
    auto l = at(x);
    return {value(partial(l.phi, 0)), value(partial(l.phi, 1))};
  }
  std::array<Dual1, 2> flux_d(const Local& l) const {
    auto M = constitutive::eval_M(diffusion_law, stress_d(l));
    Dual1 gx = partial(l.phi, 0), gy = partial(l.phi, 1);
    return {M.xx * gx + M.xy * gy, M.xy * gx + M.yy * gy};
  }
  /// M(sigma) grad phi
  Point zeta(const Point& x) const {
    auto z = flux_d(at(x));
    return {z[0].v, z[1].v};
  }
  double div_zeta(const Point& x) const {
    auto z = flux_d(at(x));
    return z[0].d[0] + z[1].d[1];
  }
  /// theta phi - div zeta
  double g(const Point& x) const { return params.theta * phi(x) - div_zeta(x); }

  Point traction(const Point& x, const Point& n) const {
    Tensor s = sigma(x);
    return {s.xx * n.x() + s.xy * n.y(), s.xy * n.x() + s.yy * n.y()};
  }

  solver::ElasticityData elasticity_data() const {
    solver::ElasticityData d;
    d.body_force = [this](const Point& x) { return f(x); };
    d.displacement = [this](const Point& x) { return u(x); };
    d.traction = [this](const Point& x, const Point& n) { return traction(x, n); };
    return d;
  }
  solver::DiffusionData diffusion_data() const {
    solver::DiffusionData d;
    d.source = [this](const Point& x) { return g(x); };
    d.concentration = [this](const Point& x) { return phi(x); };
    d.normal_flux = [this](const Point& x, const Point& n) { return zeta(x).dot(n); };
    return d;
  }
  /// The coupled problem with data from this case; the case must outlive it.
  solver::CoupledProblem problem() const {
    solver::CoupledProblem p;
    p.params = params;
    p.diffusion_law = diffusion_law;
    p.active_law = active_law;
    p.elasticity = elasticity_data();
    p.diffusion = diffusion_data();
    return p;
  }

  /// Exact stresses on an n x n grid of cell centres, for the coefficient bound.
  std::vector<Tensor> stress_grid(int n) const {
    std::vector<Tensor> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Point x(domain.x0 + (i + 0.5) / n * (domain.x1 - domain.x0), domain.y0 + (j + 0.5) / n * (domain.y1 - domain.y0));
        out.push_back(sigma(x));
      }
    return out;
  }
  double estimate_bound(int n = 400, constitutive::BoundNorm norm = constitutive::BoundNorm::Ellipticity) const {
    return constitutive::estimate_M_bound(diffusion_law, stress_grid(n), norm);
  }

 private:
  static Tensor value_of(const constitutive::Sym2<Dual1>& s) { return {s.xx.v, s.xy.v, s.yy.v}; }
};

/// Smooth trigonometric case on the unit square with the exponential
/// diffusion law and the Hill active stress.
inline ManufacturedCase smooth_case() {
  ManufacturedCase c;
  c.name = "smooth";
  c.params = {.lambda = 1e3, .mu = 1e2, .theta = 1e-3, .M_bound = 11.57701};
  c.diffusion_law = constitutive::ExponentialLaw{0.1, 1e-4};
  c.active_law = constitutive::HillLaw{1.0, 1.0, 2.0};
  c.displacement = [](const Dual2& x, const Dual2& y) {
    return std::array<Dual2, 2>{(cos(x) * sin(y) * x + x * x) * 0.2, (sin(x) * cos(y) * x + y * y) * 0.2};
  };
  c.concentration = [](const Dual2& x, const Dual2& y) {
    constexpr double pi = std::numbers::pi;
    return x * x + y * y + sin(x * pi) + cos(y * pi);
  };
  return c;
}

/// Quadratic displacement, linear concentration and constant coefficients:
/// the discrete coupled problem reproduces it up to round-off when k2 >= 1.
inline ManufacturedCase polynomial_case() {
  ManufacturedCase c;
  c.name = "polynomial";
  c.params = {.lambda = 50.0, .mu = 2.0, .theta = 0.1, .M_bound = 2.0};
  c.diffusion_law = constitutive::ExponentialLaw{0.5, 0.0};
  c.active_law = constitutive::LinearLaw{0.0};
  c.displacement = [](const Dual2& x, const Dual2& y) {
    return std::array<Dual2, 2>{x * x - x * y * 2.0 + y * 0.5, x * y + y * y * 0.5 - x};
  };
  c.concentration = [](const Dual2& x, const Dual2& y) { return x * 0.5 - y + 1.0; };
  return c;
}

}  // namespace vemsad::bench
