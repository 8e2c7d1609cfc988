#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>
#include <vector>

#include "vemsad/core/error.hpp"

namespace vemsad::solver {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Block system [[A, B], [B^T, -c C]] [x; y] = [F; G] with essential values
/// on some primal unknowns.
struct SaddleSystem {
  SparseMatrix A, B, C;
  double c = 1.0;
  Eigen::VectorXd F, G;
  std::vector<int> fixed;          // constrained primal indices
  std::vector<double> fixed_values;

  int n_primal() const { return static_cast<int>(A.rows()); }
  int n_dual() const { return static_cast<int>(C.rows()); }
  int size() const { return n_primal() + n_dual(); }

  /// The full block matrix before constraints.
  SparseMatrix block_matrix() const {
    const int n = n_primal(), m = n_dual();
    Triplets t;
    t.reserve(A.nonZeros() + 2 * B.nonZeros() + C.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
        t.emplace_back(it.row(), n + it.col(), it.value());
        t.emplace_back(n + it.col(), it.row(), it.value());
      }
    for (int k = 0; k < C.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(C, k); it; ++it) t.emplace_back(n + it.row(), n + it.col(), -c * it.value());
    SparseMatrix S(n + m, n + m);
    S.setFromTriplets(t.begin(), t.end());
    return S;
  }

  /// Matrix and right-hand side with the essential values eliminated
  /// symmetrically: constrained rows and columns are zeroed, the diagonal set
  /// to one and the known values lifted into the right-hand side.
  std::pair<SparseMatrix, Eigen::VectorXd> constrained() const {
    SparseMatrix S = block_matrix();
    const int n = size();
    Eigen::VectorXd rhs(n);
    rhs << F, G;
    std::vector<char> is_fixed(n, 0);
    Eigen::VectorXd lift = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      is_fixed[fixed[i]] = 1;
      lift(fixed[i]) = fixed_values[i];
    }
    rhs -= S * lift;
    Triplets t;
    t.reserve(S.nonZeros());
    for (int k = 0; k < S.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(S, k); it; ++it)
        if (!is_fixed[it.row()] && !is_fixed[it.col()]) t.emplace_back(it.row(), it.col(), it.value());
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      t.emplace_back(fixed[i], fixed[i], 1.0);
      rhs(fixed[i]) = fixed_values[i];
    }
    SparseMatrix out(n, n);
    out.setFromTriplets(t.begin(), t.end());
    return {std::move(out), std::move(rhs)};
  }
};

struct SolveResult {
  Eigen::VectorXd primal, dual;
  double relative_residual = 0.0;
};

/// Symmetric inf-norm equilibration: returns d with max_j |d_i S_ij d_j| close
/// to one for every row. Keeps symmetric matrices symmetric.
inline Eigen::VectorXd equilibrate(const SparseMatrix& S, int sweeps = 20) {
  const Eigen::Index n = S.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < sweeps; ++it) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < S.outerSize(); ++k)
      for (SparseMatrix::InnerIterator e(S, k); e; ++e)
        r(e.row()) = std::max(r(e.row()), std::abs(d(e.row()) * e.value() * d(e.col())));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (r(i) == 0.0) continue;
      d(i) /= std::sqrt(r(i));
      worst = std::max(worst, std::abs(1.0 - r(i)));
    }
    if (worst < 1e-3) break;
  }
  return d;
}

/// Sparse LU solve of the equilibrated system with iterative refinement.
/// The reported residual is ||S x - rhs||_inf / ||rhs||_inf.
inline Eigen::VectorXd solve_sparse(const SparseMatrix& S, const Eigen::VectorXd& rhs, double* residual_out = nullptr) {
  const double bnorm = rhs.cwiseAbs().maxCoeff();
  if (bnorm == 0.0) {
    if (residual_out) *residual_out = 0.0;
    return Eigen::VectorXd::Zero(rhs.size());
  }
  Eigen::VectorXd dscale = equilibrate(S);
  SparseMatrix scaled = dscale.asDiagonal() * S * dscale.asDiagonal();
  Eigen::VectorXd b = dscale.cwiseProduct(rhs);
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(scaled);
  if (lu.info() != Eigen::Success) {
    std::ostringstream os;
    os << "sparse factorization failed (" << lu.lastErrorMessage()
       << "); the system is singular, check that the essential boundary covers a set of positive measure";
    throw Error(ErrorCategory::Solver, os.str());
  }
  Eigen::VectorXd y = lu.solve(b);
  const double sb = b.cwiseAbs().maxCoeff();
  double res = (b - scaled * y).cwiseAbs().maxCoeff() / sb;
  for (int it = 0; it < 5 && res > 1e-15; ++it) {
    Eigen::VectorXd next_y = y + lu.solve(b - scaled * y);
    double next = (b - scaled * next_y).cwiseAbs().maxCoeff() / sb;
    if (!(next < res)) break;
    y = std::move(next_y);
    res = next;
  }
  Eigen::VectorXd x = dscale.cwiseProduct(y);
  double true_res = (rhs - S * x).cwiseAbs().maxCoeff() / bnorm;
  if (!std::isfinite(true_res) || !std::isfinite(res) || true_res > 1e-6) {
    std::ostringstream os;
    os << "linear solve did not converge (relative residual " << true_res << ")";
    throw Error(ErrorCategory::Solver, os.str());
  }
  if (residual_out) *residual_out = true_res;
  return x;
}

inline SolveResult solve_saddle(const SaddleSystem& sys) {
  auto [S, rhs] = sys.constrained();
  SolveResult r;
  Eigen::VectorXd x = solve_sparse(S, rhs, &r.relative_residual);
  r.primal = x.head(sys.n_primal());
  r.dual = x.tail(sys.n_dual());
  return r;
}

}  // namespace vemsad::solver
