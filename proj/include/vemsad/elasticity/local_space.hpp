#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "vemsad/constitutive/laws.hpp"
#include "vemsad/mesh/polygonal_mesh.hpp"
#include "vemsad/poly/monomials.hpp"
#include "vemsad/poly/quadrature.hpp"
#include "vemsad/poly/vector_basis.hpp"

namespace vemsad::elasticity {

using mesh::Point;
using poly::dim_p;
using VectorField = std::function<Point(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

/// Displacement/pressure virtual element on one polygon.
///
/// Local displacement DoFs, in order:
///   boundary nodes (vertex i, then the k-1 interior Gauss–Lobatto nodes of
///   edge i, for each i), two components per node;
///   scaled divergence moments (h/|E|) int div v m_a, 1 <= |a| <= k-1;
///   scaled moments (1/|E|) int v . m_perp m_b, |b| <= k-3.
/// Pressures are coefficients over the scaled monomials of degree k-1.
///
/// Vector polynomials of degree k are coefficient vectors of length
/// 2*dim_p(k): x component first, then y.
class ElasticityElement {
 public:
  ElasticityElement() = default;

  ElasticityElement(const mesh::ElementGeometry& g, int k = 2, int quad_degree = -1)
      : geom_(g), k_(k), basis_(g, k), pbasis_(g, k - 1) {
    if (k < 2) throw Error(ErrorCategory::Config, "displacement degree must be >= 2");
    quad_ = poly::polygon_quadrature(g, quad_degree >= 0 ? quad_degree : 2 * k + 4);
    auto gl = poly::gauss_lobatto(k + 1);
    for (double x : gl.nodes) node_params_.push_back(0.5 * (x + 1.0));
    build();
  }

  int degree() const { return k_; }
  const mesh::ElementGeometry& geometry() const { return geom_; }
  const poly::ScaledMonomialBasis& basis() const { return basis_; }
  const poly::ScaledMonomialBasis& pressure_basis() const { return pbasis_; }
  const poly::PolygonQuadrature& quadrature() const { return quad_; }

  int num_boundary_nodes() const { return static_cast<int>(geom_.num_vertices()) * k_; }
  int num_div_moments() const { return dim_p(k_ - 1) - 1; }
  int num_perp_moments() const { return dim_p(k_ - 3); }
  int num_dofs() const { return 2 * num_boundary_nodes() + num_div_moments() + num_perp_moments(); }
  int num_pressure() const { return dim_p(k_ - 1); }
  int poly_size() const { return 2 * dim_p(k_); }

  /// Boundary node j (0 = the vertex) on local edge i.
  int node(int edge, int j) const { return (edge % static_cast<int>(geom_.num_vertices())) * k_ + j; }
  int node_dof(int node, int comp) const { return 2 * node + comp; }
  int div_dof(int i) const { return 2 * num_boundary_nodes() + i; }
  int perp_dof(int i) const { return 2 * num_boundary_nodes() + num_div_moments() + i; }

  Point node_position(int edge, int j) const {
    const Point& a = geom_.vertex(edge);
    const Point& b = geom_.vertex(edge + 1);
    return a + node_params_[j] * (b - a);
  }

  /// DoFs of each vector monomial (columns).
  const Eigen::MatrixXd& dof_matrix() const { return D_; }
  /// Energy projection: DoFs -> coefficients in (P_k)^2.
  const Eigen::MatrixXd& pi_eps() const { return pi_eps_; }
  /// L2 projection onto (P_{k-2})^2: DoFs -> coefficients.
  const Eigen::MatrixXd& pi_low() const { return pi_low_; }
  /// G_ij = int eps(p_i) : eps(p_j)
  const Eigen::MatrixXd& energy_gram() const { return G_; }

  /// Local a1h for shear modulus mu.
  Eigen::MatrixXd stiffness(double mu) const { return (2.0 * mu) * K_; }
  Eigen::MatrixXd consistency_part(double mu) const { return (2.0 * mu) * (pi_eps_.transpose() * G_ * pi_eps_); }

  /// Rows over displacement DoFs, columns over pressure coefficients: -int q div v.
  const Eigen::MatrixXd& coupling() const { return b1_; }
  const Eigen::MatrixXd& pressure_mass() const { return c1_; }

  /// int f . Pi_low v
  Eigen::VectorXd load(const VectorField& f) const {
    const int nl = dim_p(k_ - 2);
    Eigen::VectorXd fl = Eigen::VectorXd::Zero(2 * nl);
    for (std::size_t q = 0; q < quad_.size(); ++q) {
      Eigen::VectorXd m = basis_.eval(quad_.points[q]).head(nl);
      Point fv = f(quad_.points[q]);
      fl.head(nl) += quad_.weights[q] * fv.x() * m;
      fl.tail(nl) += quad_.weights[q] * fv.y() * m;
    }
    return pi_low_.transpose() * fl;
  }

  /// -(1/lambda) int ell q, for a pointwise active stress.
  Eigen::VectorXd active_load(const ScalarField& ell, double lambda) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(num_pressure());
    for (std::size_t q = 0; q < quad_.size(); ++q)
      g += quad_.weights[q] * ell(quad_.points[q]) * pbasis_.eval(quad_.points[q]);
    return (-1.0 / lambda) * g;
  }

  /// int_e t . v over local edge `edge`.
  Eigen::VectorXd traction(int edge, const VectorField& t, int points = -1) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(num_dofs());
    auto r = poly::edge_gauss(geom_.vertex(edge), geom_.vertex(edge + 1), points > 0 ? points : k_ + 4);
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      Eigen::VectorXd L = poly::lagrange_basis(node_params_, r.params[q]);
      Point tv = t(r.points[q]);
      for (int l = 0; l <= k_; ++l) {
        int nd = edge_node(edge, l);
        out(node_dof(nd, 0)) += r.weights[q] * L(l) * tv.x();
        out(node_dof(nd, 1)) += r.weights[q] * L(l) * tv.y();
      }
    }
    return out;
  }

  /// DoF image of a smooth field given with its divergence.
  Eigen::VectorXd interpolate(const VectorField& v, const ScalarField& div_v) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(num_dofs());
    const int nv = static_cast<int>(geom_.num_vertices());
    for (int e = 0; e < nv; ++e)
      for (int j = 0; j < k_; ++j) {
        Point val = v(node_position(e, j));
        d(node_dof(node(e, j), 0)) = val.x();
        d(node_dof(node(e, j), 1)) = val.y();
      }
    const double h = geom_.diameter, area = geom_.area;
    for (std::size_t q = 0; q < quad_.size(); ++q) {
      const Point& x = quad_.points[q];
      Eigen::VectorXd m = basis_.eval(x);
      double dv = div_v(x);
      Point vv = v(x);
      for (int a = 0; a < num_div_moments(); ++a) d(div_dof(a)) += quad_.weights[q] * dv * m(a + 1) * h / area;
      for (int b = 0; b < num_perp_moments(); ++b) {
        auto [e1, e2] = poly::monomial_exponent(b);
        double perp = vv.x() * m(poly::monomial_index(e1, e2 + 1)) - vv.y() * m(poly::monomial_index(e1 + 1, e2));
        d(perp_dof(b)) += quad_.weights[q] * perp / area;
      }
    }
    return d;
  }

  /// Value of the vector polynomial with coefficients c at x.
  Point eval_poly(const Eigen::VectorXd& c, const Point& x) const {
    Eigen::VectorXd m = basis_.eval(x);
    const int n = dim_p(k_);
    return {c.head(n).dot(m), c.tail(n).dot(m)};
  }

  /// Symmetric gradient of the vector polynomial with coefficients c at x.
  constitutive::Sym2<double> strain(const Eigen::VectorXd& c, const Point& x) const {
    Eigen::Matrix2Xd g = basis_.grad(x);
    const int n = dim_p(k_);
    Eigen::Vector2d gx = g * c.head(n), gy = g * c.tail(n);
    return {gx(0), 0.5 * (gx(1) + gy(0)), gy(1)};
  }

 private:
  int edge_node(int edge, int l) const { return l < k_ ? node(edge, l) : node(edge + 1, 0); }

  /// Symmetric gradient of vector monomial j at a point, from the monomial gradient table.
  static constitutive::Sym2<double> monomial_strain(const Eigen::Matrix2Xd& g, int j, int n) {
    if (j < n) return {g(0, j), 0.5 * g(1, j), 0.0};
    return {0.0, 0.5 * g(0, j - n), g(1, j - n)};
  }

  static double ddot(const constitutive::Sym2<double>& a, const constitutive::Sym2<double>& b) {
    return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
  }

  void build() {
    const int n = dim_p(k_);
    const int np = poly_size();
    const int nd = num_dofs();
    const int ndiv = num_div_moments(), nperp = num_perp_moments();
    const int nv = static_cast<int>(geom_.num_vertices());
    const double h = geom_.diameter, area = geom_.area;

    // Dof matrix and energy Gram matrix.
    D_ = Eigen::MatrixXd::Zero(nd, np);
    for (int e = 0; e < nv; ++e)
      for (int j = 0; j < k_; ++j) {
        Eigen::VectorXd m = basis_.eval(node_position(e, j));
        int id = node(e, j);
        D_.row(node_dof(id, 0)).head(n) = m.transpose();
        D_.row(node_dof(id, 1)).tail(n) = m.transpose();
      }
    G_ = Eigen::MatrixXd::Zero(np, np);
    for (std::size_t q = 0; q < quad_.size(); ++q) {
      const Point& x = quad_.points[q];
      const double w = quad_.weights[q];
      Eigen::VectorXd m = basis_.eval(x);
      Eigen::Matrix2Xd g = basis_.grad(x);
      for (int j = 0; j < np; ++j) {
        auto ej = monomial_strain(g, j, n);
        for (int i = 0; i <= j; ++i) G_(i, j) += w * ddot(monomial_strain(g, i, n), ej);
        // div p_j = d/dx of x part or d/dy of y part
        double divj = j < n ? g(0, j) : g(1, j - n);
        for (int a = 0; a < ndiv; ++a) D_(div_dof(a), j) += w * divj * m(a + 1) * h / area;
        double pj_x = j < n ? m(j) : 0.0, pj_y = j < n ? 0.0 : m(j - n);
        for (int b = 0; b < nperp; ++b) {
          auto [e1, e2] = poly::monomial_exponent(b);
          double perp = pj_x * m(poly::monomial_index(e1, e2 + 1)) - pj_y * m(poly::monomial_index(e1 + 1, e2));
          D_(perp_dof(b), j) += w * perp / area;
        }
      }
    }
    Eigen::MatrixXd full = G_.selfadjointView<Eigen::Upper>();
    G_ = full;

    // Boundary functionals: flux moments oint v.n m_a (|a| <= k-1) and oint v . eps(p_j) n.
    Eigen::MatrixXd flux = Eigen::MatrixXd::Zero(dim_p(k_ - 1), nd);
    Eigen::MatrixXd edge_energy = Eigen::MatrixXd::Zero(np, nd);
    for (int e = 0; e < nv; ++e) {
      Point nrm = geom_.outward_normal(e);
      auto r = poly::edge_gauss(geom_.vertex(e), geom_.vertex(e + 1), k_ + 2);
      for (std::size_t q = 0; q < r.points.size(); ++q) {
        Eigen::VectorXd L = poly::lagrange_basis(node_params_, r.params[q]);
        Eigen::VectorXd m = basis_.eval(r.points[q]);
        Eigen::Matrix2Xd g = basis_.grad(r.points[q]);
        const double w = r.weights[q];
        for (int l = 0; l <= k_; ++l) {
          int id = edge_node(e, l);
          for (int c = 0; c < 2; ++c) {
            int col = node_dof(id, c);
            double base = w * L(l) * nrm(c);
            flux.col(col) += base * m.head(dim_p(k_ - 1));
            for (int j = 0; j < np; ++j) {
              auto ej = monomial_strain(g, j, n);
              double tn = c == 0 ? ej.xx * nrm.x() + ej.xy * nrm.y() : ej.xy * nrm.x() + ej.yy * nrm.y();
              edge_energy(j, col) += w * L(l) * tn;
            }
          }
        }
      }
    }

    // Moments of v against the split basis of (P_{k-2})^2.
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(ndiv + nperp, nd);
    for (int a = 0; a < ndiv; ++a) {
      moments.row(a) = h * flux.row(a + 1);
      moments(a, div_dof(a)) -= area;
    }
    for (int b = 0; b < nperp; ++b) moments(ndiv + b, perp_dof(b)) = area;

    // div eps(p_j) in (P_{k-2})^2, decomposed on the split basis.
    const int nl = dim_p(k_ - 2);
    Eigen::MatrixXd dx1 = poly::derivative_matrix(k_, 0), dy1 = poly::derivative_matrix(k_, 1);
    Eigen::MatrixXd dx2 = poly::derivative_matrix(k_ - 1, 0), dy2 = poly::derivative_matrix(k_ - 1, 1);
    Eigen::MatrixXd xx = dx2 * dx1, yy = dy2 * dy1, xy = dx2 * dy1;
    Eigen::MatrixXd div_eps = Eigen::MatrixXd::Zero(2 * nl, np);
    div_eps.block(0, 0, nl, n) = xx + 0.5 * yy;
    div_eps.block(nl, 0, nl, n) = 0.5 * xy;
    div_eps.block(0, n, nl, n) = 0.5 * xy;
    div_eps.block(nl, n, nl, n) = 0.5 * xx + yy;
    div_eps /= h * h;
    auto split = poly::vector_basis_split(k_ - 2);
    Eigen::MatrixXd T = split.combined();
    Eigen::MatrixXd coeffs = T.fullPivLu().solve(div_eps);  // (ndiv+nperp) x np

    Eigen::MatrixXd B = edge_energy - coeffs.transpose() * moments;

    // Rigid-body constraints through vertex sums.
    Eigen::MatrixXd Cp = Eigen::MatrixXd::Zero(3, np), Cd = Eigen::MatrixXd::Zero(3, nd);
    for (int i = 0; i < nv; ++i) {
      const Point& z = geom_.vertex(i);
      Eigen::VectorXd m = basis_.eval(z);
      Point s = basis_.local(z);
      std::array<Point, 3> rig{Point(1, 0), Point(0, 1), Point(-s.y(), s.x())};
      for (int r = 0; r < 3; ++r) {
        Cp.row(r).head(n) += rig[r].x() * m.transpose();
        Cp.row(r).tail(n) += rig[r].y() * m.transpose();
        Cd(r, node_dof(node(i, 0), 0)) += rig[r].x();
        Cd(r, node_dof(node(i, 0), 1)) += rig[r].y();
      }
    }
    Eigen::MatrixXd lhs = G_ + Cp.transpose() * Cp;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 1e-14 * ldlt.vectorD().cwiseAbs().maxCoeff()))
      throw Error(ErrorCategory::Mesh, "energy projection is singular on a degenerate element");
    pi_eps_ = ldlt.solve(B + Cp.transpose() * Cd);

    // L2 projection onto (P_{k-2})^2.
    poly::ScaledMonomialBasis low(geom_, k_ - 2);
    Eigen::MatrixXd H = poly::monomial_mass_matrix(low, quad_);
    Eigen::MatrixXd Hv = Eigen::MatrixXd::Zero(2 * nl, 2 * nl);
    Hv.topLeftCorner(nl, nl) = H;
    Hv.bottomRightCorner(nl, nl) = H;
    pi_low_ = (T.transpose() * Hv).fullPivLu().solve(moments);

    Eigen::MatrixXd I_minus = Eigen::MatrixXd::Identity(nd, nd) - D_ * pi_eps_;
    K_ = pi_eps_.transpose() * G_ * pi_eps_ + I_minus.transpose() * I_minus;
    K_ = 0.5 * (K_ + K_.transpose()).eval();

    // Pressure coupling and mass.
    b1_ = Eigen::MatrixXd::Zero(nd, num_pressure());
    b1_.col(0) = -flux.row(0).transpose();
    for (int a = 0; a < ndiv; ++a) b1_(div_dof(a), a + 1) = -area / h;
    c1_ = poly::monomial_mass_matrix(pbasis_, quad_);
  }

  mesh::ElementGeometry geom_;
  int k_ = 2;
  poly::ScaledMonomialBasis basis_, pbasis_;
  poly::PolygonQuadrature quad_;
  std::vector<double> node_params_;
  Eigen::MatrixXd D_, G_, pi_eps_, pi_low_, K_, b1_, c1_;
};

}  // namespace vemsad::elasticity
