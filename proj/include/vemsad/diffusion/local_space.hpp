#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "vemsad/constitutive/laws.hpp"
#include "vemsad/mesh/polygonal_mesh.hpp"
#include "vemsad/poly/monomials.hpp"
#include "vemsad/poly/quadrature.hpp"
#include "vemsad/poly/vector_basis.hpp"

namespace vemsad::diffusion {

using mesh::Point;
using poly::dim_p;
using VectorField = std::function<Point(const Point&)>;
using ScalarField = std::function<double(const Point&)>;
using Tensor = constitutive::Sym2<double>;

/// Values along a -> b at the k+1 Gauss–Lobatto nodes of the L2 projection
/// of `normal_flux` onto P_k(e).
inline Eigen::VectorXd edge_projected_values(const Point& a, const Point& b, int k, const ScalarField& normal_flux,
                                             int points = -1) {
  auto gl = poly::gauss_lobatto(k + 1);
  std::vector<double> nodes;
  for (double x : gl.nodes) nodes.push_back(0.5 * (x + 1.0));
  auto r = poly::edge_gauss(a, b, points > 0 ? points : k + 6);
  // Mass and load in the Lagrange basis through the nodes.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(k + 1);
  for (std::size_t q = 0; q < r.points.size(); ++q) {
    Eigen::VectorXd L = poly::lagrange_basis(nodes, r.params[q]);
    M += r.weights[q] * L * L.transpose();
    f += r.weights[q] * normal_flux(r.points[q]) * L;
  }
  return M.ldlt().solve(f);
}

/// Flux/concentration virtual element on one polygon.
///
/// Local flux DoFs, in order:
///   xi . n_E at the k+1 Gauss–Lobatto nodes of edge i, in the element's
///   traversal direction, for each i (n_E the outward normal);
///   (1/|E|) int xi . h grad m_a, 1 <= |a| <= k;
///   (1/|E|) int xi . m_perp m_b, |b| <= k-1.
/// Concentrations are coefficients over the scaled monomials of degree k.
class DiffusionElement {
 public:
  DiffusionElement() = default;

  DiffusionElement(const mesh::ElementGeometry& g, int k, int quad_degree = -1) : geom_(g), k_(k), basis_(g, k) {
    if (k < 0) throw Error(ErrorCategory::Config, "flux degree must be >= 0");
    quad_ = poly::polygon_quadrature(g, quad_degree >= 0 ? quad_degree : 2 * k + 4);
    auto gl = poly::gauss_lobatto(k + 1);
    for (double x : gl.nodes) node_params_.push_back(0.5 * (x + 1.0));
    build();
  }

  int degree() const { return k_; }
  const mesh::ElementGeometry& geometry() const { return geom_; }
  const poly::ScaledMonomialBasis& basis() const { return basis_; }
  const poly::PolygonQuadrature& quadrature() const { return quad_; }

  int nodes_per_edge() const { return k_ + 1; }
  int num_grad_moments() const { return dim_p(k_) - 1; }
  int num_perp_moments() const { return dim_p(k_ - 1); }
  int num_edge_dofs() const { return static_cast<int>(geom_.num_vertices()) * (k_ + 1); }
  int num_dofs() const { return num_edge_dofs() + num_grad_moments() + num_perp_moments(); }
  int num_concentration() const { return dim_p(k_); }
  int poly_size() const { return 2 * dim_p(k_); }

  int edge_dof(int edge, int j) const { return edge * (k_ + 1) + j; }
  int grad_dof(int i) const { return num_edge_dofs() + i; }
  int perp_dof(int i) const { return num_edge_dofs() + num_grad_moments() + i; }

  Point node_position(int edge, int j) const {
    const Point& a = geom_.vertex(edge);
    const Point& b = geom_.vertex(edge + 1);
    return a + node_params_[j] * (b - a);
  }

  const Eigen::MatrixXd& dof_matrix() const { return D_; }
  /// DoFs -> coefficients of Pi^0_k xi in (P_k)^2.
  const Eigen::MatrixXd& pi0() const { return pi0_; }
  /// DoFs -> coefficients of div xi in P_k.
  const Eigen::MatrixXd& divergence() const { return div_; }
  /// Rows over flux DoFs, columns over concentration coefficients: int psi div xi.
  Eigen::MatrixXd coupling() const { return moments_div_.transpose(); }
  const Eigen::MatrixXd& mass() const { return H_; }

  /// int K p_i . p_j over the vector monomials, K given at the quadrature points.
  Eigen::MatrixXd weighted_gram(const std::vector<Tensor>& K) const {
    const int n = dim_p(k_);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (std::size_t q = 0; q < quad_.size(); ++q) {
      Eigen::VectorXd m = basis_.eval(quad_.points[q]);
      Eigen::MatrixXd mm = quad_.weights[q] * m * m.transpose();
      A.topLeftCorner(n, n) += K[q].xx * mm;
      A.topRightCorner(n, n) += K[q].xy * mm;
      A.bottomRightCorner(n, n) += K[q].yy * mm;
    }
    A.bottomLeftCorner(n, n) = A.topRightCorner(n, n).transpose();
    return A;
  }

  /// Frobenius norm of int_E K.
  double stabilization_scale(const std::vector<Tensor>& K) const {
    Tensor s{0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < quad_.size(); ++q) s = s + K[q] * quad_.weights[q];
    return constitutive::frobenius(s);
  }

  /// Local a2h with coefficient K (the inverse diffusion tensor) at the quadrature points.
  Eigen::MatrixXd stiffness(const std::vector<Tensor>& K) const {
    if (K.size() != quad_.size()) throw Error(ErrorCategory::Solver, "coefficient sample count mismatch");
    Eigen::MatrixXd A = pi0_.transpose() * weighted_gram(K) * pi0_ + stabilization_scale(K) * S_;
    return 0.5 * (A + A.transpose());
  }

  /// -int g psi
  Eigen::VectorXd source(const ScalarField& g) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(num_concentration());
    for (std::size_t q = 0; q < quad_.size(); ++q)
      out -= quad_.weights[q] * g(quad_.points[q]) * basis_.eval(quad_.points[q]);
    return out;
  }

  /// int_e phi_D (xi . n_E) over local edge `edge`.
  Eigen::VectorXd boundary_load(int edge, const ScalarField& phi_d, int points = -1) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(num_dofs());
    auto r = poly::edge_gauss(geom_.vertex(edge), geom_.vertex(edge + 1), points > 0 ? points : k_ + 6);
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      Eigen::VectorXd L = poly::lagrange_basis(node_params_, r.params[q]);
      double v = phi_d(r.points[q]);
      for (int j = 0; j <= k_; ++j) out(edge_dof(edge, j)) += r.weights[q] * v * L(j);
    }
    return out;
  }

  /// DoF image of a smooth field. With `edge_projection` the edge values come
  /// from the L2 projection of xi . n onto P_k(e) (this commutes with the
  /// divergence); otherwise they are point values.
  Eigen::VectorXd interpolate(const VectorField& xi, bool edge_projection = true) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(num_dofs());
    const int nv = static_cast<int>(geom_.num_vertices());
    for (int e = 0; e < nv; ++e) {
      Point n = geom_.outward_normal(e);
      if (edge_projection) {
        d.segment(edge_dof(e, 0), k_ + 1) = edge_projected_values(
            geom_.vertex(e), geom_.vertex(e + 1), k_, [&](const Point& x) { return xi(x).dot(n); });
      } else {
        for (int j = 0; j <= k_; ++j) d(edge_dof(e, j)) = xi(node_position(e, j)).dot(n);
      }
    }
    const double h = geom_.diameter, area = geom_.area;
    for (std::size_t q = 0; q < quad_.size(); ++q) {
      const Point& x = quad_.points[q];
      Point v = xi(x);
      Eigen::VectorXd m = basis_.eval(x);
      Eigen::Matrix2Xd g = basis_.grad(x);
      for (int a = 0; a < num_grad_moments(); ++a)
        d(grad_dof(a)) += quad_.weights[q] * h * (v.x() * g(0, a + 1) + v.y() * g(1, a + 1)) / area;
      for (int b = 0; b < num_perp_moments(); ++b) {
        auto [e1, e2] = poly::monomial_exponent(b);
        double perp = v.x() * m(poly::monomial_index(e1, e2 + 1)) - v.y() * m(poly::monomial_index(e1 + 1, e2));
        d(perp_dof(b)) += quad_.weights[q] * perp / area;
      }
    }
    return d;
  }

  Point eval_poly(const Eigen::VectorXd& c, const Point& x) const {
    Eigen::VectorXd m = basis_.eval(x);
    const int n = dim_p(k_);
    return {c.head(n).dot(m), c.tail(n).dot(m)};
  }

 private:
  void build() {
    const int n = dim_p(k_);
    const int np = poly_size();
    const int nd = num_dofs();
    const int ng = num_grad_moments(), nperp = num_perp_moments();
    const int nv = static_cast<int>(geom_.num_vertices());
    const double h = geom_.diameter, area = geom_.area;
    poly::ScaledMonomialBasis big(geom_, k_ + 1);
    const int nbig = dim_p(k_ + 1);

    D_ = Eigen::MatrixXd::Zero(nd, np);
    for (int e = 0; e < nv; ++e) {
      Point nrm = geom_.outward_normal(e);
      for (int j = 0; j <= k_; ++j) {
        Eigen::VectorXd m = basis_.eval(node_position(e, j));
        D_.row(edge_dof(e, j)).head(n) = nrm.x() * m.transpose();
        D_.row(edge_dof(e, j)).tail(n) = nrm.y() * m.transpose();
      }
    }
    Eigen::MatrixXd Hbig = poly::monomial_mass_matrix(big, quad_);
    H_ = Hbig.topLeftCorner(n, n);
    for (std::size_t q = 0; q < quad_.size(); ++q) {
      const Point& x = quad_.points[q];
      const double w = quad_.weights[q];
      Eigen::VectorXd m = basis_.eval(x);
      Eigen::Matrix2Xd g = basis_.grad(x);
      for (int j = 0; j < np; ++j) {
        double px = j < n ? m(j) : 0.0, py = j < n ? 0.0 : m(j - n);
        for (int a = 0; a < ng; ++a) D_(grad_dof(a), j) += w * h * (px * g(0, a + 1) + py * g(1, a + 1)) / area;
        for (int b = 0; b < nperp; ++b) {
          auto [e1, e2] = poly::monomial_exponent(b);
          double perp = px * m(poly::monomial_index(e1, e2 + 1)) - py * m(poly::monomial_index(e1 + 1, e2));
          D_(perp_dof(b), j) += w * perp / area;
        }
      }
    }

    // oint (xi . n_E) m_a for |a| <= k+1.
    Eigen::MatrixXd flux = Eigen::MatrixXd::Zero(nbig, nd);
    for (int e = 0; e < nv; ++e) {
      auto r = poly::edge_gauss(geom_.vertex(e), geom_.vertex(e + 1), k_ + 2);
      for (std::size_t q = 0; q < r.points.size(); ++q) {
        Eigen::VectorXd L = poly::lagrange_basis(node_params_, r.params[q]);
        Eigen::VectorXd m = big.eval(r.points[q]);
        for (int j = 0; j <= k_; ++j) flux.col(edge_dof(e, j)) += r.weights[q] * L(j) * m;
      }
    }

    // int div xi m_a = -int xi . grad m_a + oint (xi . n) m_a, |a| <= k.
    moments_div_ = flux.topRows(n);
    for (int a = 0; a < ng; ++a) moments_div_(a + 1, grad_dof(a)) -= area / h;
    Eigen::LLT<Eigen::MatrixXd> llt(H_);
    if (llt.info() != Eigen::Success) throw Error(ErrorCategory::Mesh, "singular mass matrix on a degenerate element");
    div_ = llt.solve(moments_div_);

    // Moments against the split basis of (P_k)^2.
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(nbig - 1 + nperp, nd);
    Eigen::MatrixXd div_moments_big = Hbig.leftCols(n) * div_;  // int div xi m_a, |a| <= k+1
    for (int a = 1; a < nbig; ++a) moments.row(a - 1) = h * (flux.row(a) - div_moments_big.row(a));
    for (int b = 0; b < nperp; ++b) moments(nbig - 1 + b, perp_dof(b)) = area;
    auto split = poly::vector_basis_split(k_);
    Eigen::MatrixXd T = split.combined();
    Eigen::MatrixXd Hv = Eigen::MatrixXd::Zero(np, np);
    Hv.topLeftCorner(n, n) = H_;
    Hv.bottomRightCorner(n, n) = H_;
    pi0_ = (T.transpose() * Hv).fullPivLu().solve(moments);

    Eigen::MatrixXd I_minus = Eigen::MatrixXd::Identity(nd, nd) - D_ * pi0_;
    S_ = I_minus.transpose() * I_minus;
  }

  mesh::ElementGeometry geom_;
  int k_ = 0;
  poly::ScaledMonomialBasis basis_;
  poly::PolygonQuadrature quad_;
  std::vector<double> node_params_;
  Eigen::MatrixXd D_, H_, moments_div_, div_, pi0_, S_;
};

}  // namespace vemsad::diffusion
