#pragma once

#include <Eigen/Dense>

#include "vemsad/poly/monomials.hpp"

namespace vemsad::poly {

/// Split of (P_k)^2 into scaled gradients of M_{k+1} \ {1} and the perp part
/// m_perp * M_{k-1}, with m_perp = (m_y, -m_x).
///
/// Each basis field is stored as a column of coefficients over M_k: rows
/// [0, dim_p(k)) hold the x component, the rest the y component.
struct VectorBasisSplit {
  int degree = 0;
  Eigen::MatrixXd grad;  // 2*dim_p(k) x (dim_p(k+1) - 1)
  Eigen::MatrixXd perp;  // 2*dim_p(k) x dim_p(k-1)

  int grad_size() const { return static_cast<int>(grad.cols()); }
  int perp_size() const { return static_cast<int>(perp.cols()); }

  /// [grad | perp], square and invertible.
  Eigen::MatrixXd combined() const {
    Eigen::MatrixXd t(grad.rows(), grad.cols() + perp.cols());
    t << grad, perp;
    return t;
  }
};

inline VectorBasisSplit vector_basis_split(int k) {
  VectorBasisSplit s;
  s.degree = k;
  const int n = dim_p(k);
  s.grad = Eigen::MatrixXd::Zero(2 * n, dim_p(k + 1) - 1);
  for (int i = 1; i < dim_p(k + 1); ++i) {
    auto [a, b] = monomial_exponent(i);
    if (a > 0) s.grad(monomial_index(a - 1, b), i - 1) = a;
    if (b > 0) s.grad(n + monomial_index(a, b - 1), i - 1) = b;
  }
  s.perp = Eigen::MatrixXd::Zero(2 * n, dim_p(k - 1));
  for (int i = 0; i < dim_p(k - 1); ++i) {
    auto [a, b] = monomial_exponent(i);
    s.perp(monomial_index(a, b + 1), i) = 1.0;
    s.perp(n + monomial_index(a + 1, b), i) = -1.0;
  }
  return s;
}

}  // namespace vemsad::poly
