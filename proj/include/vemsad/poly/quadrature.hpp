#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "vemsad/mesh/polygonal_mesh.hpp"
#include "vemsad/poly/monomials.hpp"

namespace vemsad::poly {

struct Rule1D {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

namespace detail {

/// Legendre P_n and its derivative at x.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = (std::abs(x) < 1.0) ? n * (x * p1 - p0) / (x * x - 1.0) : 0.5 * n * (n + 1.0) * std::pow(x, n + 1);
  return {p1, dp};
}

}  // namespace detail

/// n-point Gauss–Legendre rule (exact to degree 2n-1).
inline Rule1D gauss_legendre(int n) {
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = detail::legendre(n, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [p, dp] = detail::legendre(n, x);
    (void)p;
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

/// p-point Gauss–Lobatto rule; p = 1 degenerates to the midpoint rule.
inline Rule1D gauss_lobatto(int p) {
  Rule1D r;
  if (p < 1) throw Error(ErrorCategory::Config, "Gauss-Lobatto rule needs at least one point");
  if (p == 1) return {{0.0}, {2.0}};
  const int n = p - 1;  // interior nodes are roots of P'_n
  r.nodes.assign(p, 0.0);
  r.weights.assign(p, 0.0);
  r.nodes[0] = -1.0;
  r.nodes[p - 1] = 1.0;
  for (int i = 1; i < p - 1; ++i) {
    double x = -std::cos(std::numbers::pi * i / n);
    for (int it = 0; it < 100; ++it) {
      // P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1); Newton on it via the Legendre ODE.
      auto [pn, dpn] = detail::legendre(n, x);
      double d2 = (2.0 * x * dpn - n * (n + 1.0) * pn) / (1.0 - x * x);
      double dx = dpn / d2;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
  }
  for (int i = 0; i < p; ++i) {
    auto [pn, dpn] = detail::legendre(n, r.nodes[i]);
    (void)dpn;
    r.weights[i] = 2.0 / (n * (n + 1.0) * pn * pn);
  }
  return r;
}

/// Nodes and weights over a polygon.
struct PolygonQuadrature {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }

  template <class F>
  auto integrate(F&& f) const {
    auto acc = f(points[0]) * weights[0];
    for (std::size_t q = 1; q < points.size(); ++q) acc += f(points[q]) * weights[q];
    return acc;
  }
};

/// Collapsed Gauss rule on the triangle (a, b, c), exact to degree d.
inline void append_triangle_rule(PolygonQuadrature& q, const Point& a, const Point& b, const Point& c, int d) {
  const int n = std::max(1, (d + 3) / 2);
  static thread_local std::vector<Rule1D> cache;
  if (cache.size() <= static_cast<std::size_t>(n)) cache.resize(n + 1);
  if (cache[n].nodes.empty()) cache[n] = gauss_legendre(n);
  const Rule1D& g = cache[n];
  const double twice_area = mesh::detail::cross(b - a, c - a);
  for (int i = 0; i < n; ++i) {
    double s = 0.5 * (g.nodes[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      double t = 0.5 * (g.nodes[j] + 1.0);
      q.points.push_back(a + s * (b - a) + s * t * (c - b));
      q.weights.push_back(0.25 * g.weights[i] * g.weights[j] * s * twice_area);
    }
  }
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
inline std::vector<std::array<int, 3>> ear_clip(const std::vector<Point>& poly) {
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  auto inside = [&](const Point& p, const Point& a, const Point& b, const Point& c) {
    return mesh::detail::cross(b - a, p - a) >= 0 && mesh::detail::cross(c - b, p - b) >= 0 &&
           mesh::detail::cross(a - c, p - c) >= 0;
  };
  std::size_t guard = 0;
  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      int ia = idx[(i + idx.size() - 1) % idx.size()], ib = idx[i], ic = idx[(i + 1) % idx.size()];
      const Point &a = poly[ia], &b = poly[ib], &c = poly[ic];
      if (mesh::detail::cross(b - a, c - b) <= 0) continue;
      bool ear = true;
      for (int k : idx) {
        if (k == ia || k == ib || k == ic) continue;
        if (inside(poly[k], a, b, c)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + static_cast<long>(i));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > 4 * poly.size())
      throw Error(ErrorCategory::Mesh, "triangulation failed on a degenerate polygon");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

/// Quadrature over an element exact to degree d: a fan from the centroid when
/// the centroid sees every edge, ear clipping otherwise.
inline PolygonQuadrature polygon_quadrature(const mesh::ElementGeometry& g, int d) {
  PolygonQuadrature q;
  q.degree = d;
  if (mesh::sees_all_edges(g, g.centroid)) {
    for (std::size_t i = 0; i < g.num_vertices(); ++i)
      append_triangle_rule(q, g.centroid, g.vertex(i), g.vertex(i + 1), d);
  } else {
    for (const auto& t : ear_clip(g.vertices))
      append_triangle_rule(q, g.vertices[t[0]], g.vertices[t[1]], g.vertices[t[2]], d);
  }
  return q;
}

/// Points and weights along a segment for an n-point Gauss rule.
struct EdgeRule {
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<double> params;  // position in [0, 1] from the first endpoint
};

inline EdgeRule edge_gauss(const Point& a, const Point& b, int n) {
  static thread_local std::vector<Rule1D> cache;
  if (cache.size() <= static_cast<std::size_t>(n)) cache.resize(n + 1);
  if (cache[n].nodes.empty()) cache[n] = gauss_legendre(n);
  const Rule1D& g = cache[n];
  EdgeRule r;
  const double len = (b - a).norm();
  for (int i = 0; i < n; ++i) {
    double s = 0.5 * (g.nodes[i] + 1.0);
    r.params.push_back(s);
    r.points.push_back(a + s * (b - a));
    r.weights.push_back(0.5 * len * g.weights[i]);
  }
  return r;
}

inline EdgeRule edge_gauss_lobatto(const Point& a, const Point& b, int p) {
  Rule1D g = gauss_lobatto(p);
  EdgeRule r;
  const double len = (b - a).norm();
  for (int i = 0; i < p; ++i) {
    double s = 0.5 * (g.nodes[i] + 1.0);
    r.params.push_back(s);
    r.points.push_back(a + s * (b - a));
    r.weights.push_back(0.5 * len * g.weights[i]);
  }
  return r;
}

/// Lagrange basis through `nodes` (params in [0,1]) evaluated at s.
inline Eigen::VectorXd lagrange_basis(const std::vector<double>& nodes, double s) {
  Eigen::VectorXd l = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (i != j) l(static_cast<Eigen::Index>(i)) *= (s - nodes[j]) / (nodes[i] - nodes[j]);
  return l;
}

/// H_ij = int_E m_i m_j, symmetric by construction.
inline Eigen::MatrixXd monomial_mass_matrix(const ScaledMonomialBasis& basis, const PolygonQuadrature& q) {
  const int n = basis.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < q.size(); ++k) {
    Eigen::VectorXd m = basis.eval(q.points[k]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) h(i, j) += q.weights[k] * m(i) * m(j);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) h(j, i) = h(i, j);
  return h;
}

/// Ratio of extreme eigenvalues of a symmetric matrix.
inline double condition_estimate(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.size() == 0) return 1.0;
  double lo = ev.minCoeff(), hi = ev.cwiseAbs().maxCoeff();
  return lo <= 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
}

}  // namespace vemsad::poly
