#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "vemsad/mesh/polygonal_mesh.hpp"

namespace vemsad::poly {

using mesh::Point;

/// Number of monomials of total degree <= k (zero for k < 0).
constexpr int dim_p(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

/// Position of x^a y^b in the degree-then-lex ordering
/// 1, x, y, x^2, xy, y^2, ...
constexpr int monomial_index(int a, int b) { return dim_p(a + b - 1) + b; }

constexpr std::array<int, 2> monomial_exponent(int i) {
  int d = 0;
  while (dim_p(d) <= i) ++d;
  int b = i - dim_p(d - 1);
  return {d - b, b};
}

/// m_a(x) = ((x - center) / h)^a for |a| <= degree.
class ScaledMonomialBasis {
 public:
  ScaledMonomialBasis() = default;
  ScaledMonomialBasis(Point center, double h, int degree) : center_(center), h_(h), degree_(degree) {}
  ScaledMonomialBasis(const mesh::ElementGeometry& g, int degree)
      : ScaledMonomialBasis(g.centroid, g.diameter, degree) {}

  int degree() const { return degree_; }
  int size() const { return dim_p(degree_); }
  const Point& center() const { return center_; }
  double h() const { return h_; }

  Point local(const Point& x) const { return (x - center_) / h_; }

  Eigen::VectorXd eval(const Point& x) const { return eval_local(local(x), degree_); }

  /// Row 0: d/dx, row 1: d/dy.
  Eigen::Matrix2Xd grad(const Point& x) const {
    Point s = local(x);
    Eigen::VectorXd low = eval_local(s, degree_ - 1);
    Eigen::Matrix2Xd g = Eigen::Matrix2Xd::Zero(2, size());
    for (int i = 1; i < size(); ++i) {
      auto [a, b] = monomial_exponent(i);
      if (a > 0) g(0, i) = a * low(monomial_index(a - 1, b)) / h_;
      if (b > 0) g(1, i) = b * low(monomial_index(a, b - 1)) / h_;
    }
    return g;
  }

  /// Value of the polynomial with coefficients c (length <= size()).
  double value(const Eigen::Ref<const Eigen::VectorXd>& c, const Point& x) const {
    Eigen::VectorXd m = eval_local(local(x), degree_);
    return m.head(c.size()).dot(c);
  }

  static Eigen::VectorXd eval_local(const Point& s, int degree) {
    Eigen::VectorXd m(dim_p(degree));
    if (degree < 0) return m;
    m(0) = 1.0;
    for (int d = 1; d <= degree; ++d) {
      for (int b = 0; b < d; ++b) m(monomial_index(d - b, b)) = m(monomial_index(d - 1 - b, b)) * s.x();
      m(monomial_index(0, d)) = m(monomial_index(0, d - 1)) * s.y();
    }
    return m;
  }

 private:
  Point center_ = Point::Zero();
  double h_ = 1.0;
  int degree_ = 0;
};

/// Maps coefficients of p in M_k to coefficients of h * d p / d(axis) in M_{k-1}.
inline Eigen::MatrixXd derivative_matrix(int k, int axis) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim_p(k - 1), dim_p(k));
  for (int i = 1; i < dim_p(k); ++i) {
    auto [a, b] = monomial_exponent(i);
    if (axis == 0 && a > 0) d(monomial_index(a - 1, b), i) = a;
    if (axis == 1 && b > 0) d(monomial_index(a, b - 1), i) = b;
  }
  return d;
}

/// Embeds M_j coefficients into M_k (j <= k) by zero padding.
inline Eigen::MatrixXd embed_matrix(int from, int to) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim_p(to), dim_p(from));
  for (int i = 0; i < dim_p(std::min(from, to)); ++i) e(i, i) = 1.0;
  return e;
}

}  // namespace vemsad::poly
