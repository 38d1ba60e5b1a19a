#pragma once

// Symmetric-matrix numerics shared by the estimators, the portfolio
// constructors and the moment oracle. Everything here is a pure function of
// its inputs and is templated on the scalar type.

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "trendlab/error.hpp"

namespace trendlab::symmat {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Spectrum of a symmetric matrix. Eigenvalues are sorted in descending
/// order, columns of `vectors` are orthonormal and each column has its first
/// nonzero component positive.
template <typename Scalar>
struct EigenPairs {
  Vector<Scalar> values;
  Matrix<Scalar> vectors;

  Matrix<Scalar> reconstruct() const {
    return vectors * values.asDiagonal() * vectors.transpose();
  }
};

template <typename Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Exact symmetry check (no tolerance); used at module boundaries.
template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

/// (m + m^T)/2, which is bitwise symmetric.
template <typename Derived>
Matrix<typename Derived::Scalar> symmetrize(const Eigen::MatrixBase<Derived>& m) {
  Matrix<typename Derived::Scalar> out = (m + m.transpose()) / typename Derived::Scalar(2);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = i + 1; j < out.cols(); ++j) out(j, i) = out(i, j);
  return out;
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw Error(ErrorKind::InvalidMatrix, std::string(what) + ": matrix must be square with dim >= 1");
}

/// Default regularization: 1e-8 times the average diagonal entry.
template <typename Derived>
typename Derived::Scalar default_ridge(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0) return Scalar(0);
  const Scalar avg = m.trace() / static_cast<Scalar>(m.rows());
  return avg > Scalar(0) ? Scalar(1e-8) * avg : Scalar(0);
}

template <typename Derived>
EigenPairs<typename Derived::Scalar> eigendecompose(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_square(m, "eigendecompose");
  if (!m.allFinite()) throw Error(ErrorKind::InvalidMatrix, "eigendecompose: non-finite entries");

  const Matrix<Scalar> sym = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::InvalidMatrix, "eigendecompose: solver did not converge");

  const Eigen::Index n = sym.rows();
  EigenPairs<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }

  const Scalar tiny = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar x = out.vectors(i, k);
      if (std::abs(x) > tiny) {
        if (x < Scalar(0)) out.vectors.col(k) *= Scalar(-1);
        break;
      }
    }
  }
  return out;
}

/// Rebuilds U f(Λ) U^T from a spectrum, applying `fn` to each eigenvalue.
template <typename Scalar, typename Fn>
Matrix<Scalar> spectral_apply(const EigenPairs<Scalar>& pairs, Fn&& fn) {
  Vector<Scalar> mapped(pairs.values.size());
  for (Eigen::Index k = 0; k < mapped.size(); ++k) mapped(k) = fn(pairs.values(k));
  return symmetrize(pairs.vectors * mapped.asDiagonal() * pairs.vectors.transpose());
}

namespace detail {

template <typename Scalar>
void require_positive_shifted(const EigenPairs<Scalar>& pairs, Scalar ridge, const char* what) {
  if (ridge < Scalar(0)) throw Error(ErrorKind::InvalidInput, std::string(what) + ": ridge must be >= 0");
  for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
    if (!(pairs.values(k) + ridge > Scalar(0)))
      throw Error(ErrorKind::NotPositiveDefinite,
                  std::string(what) + ": eigenvalue + ridge <= 0 (eigenvalue " +
                      std::to_string(static_cast<double>(pairs.values(k))) + ")");
  }
}

}  // namespace detail

/// P with P (m + ridge I) P = I.
template <typename Derived>
Matrix<typename Derived::Scalar> inv_sqrt(const Eigen::MatrixBase<Derived>& m,
                                          typename Derived::Scalar ridge) {
  using Scalar = typename Derived::Scalar;
  const auto pairs = eigendecompose(m);
  detail::require_positive_shifted(pairs, ridge, "inv_sqrt");
  return spectral_apply(pairs, [ridge](Scalar l) { return Scalar(1) / std::sqrt(l + ridge); });
}

/// (m + ridge I)^{-1}.
template <typename Derived>
Matrix<typename Derived::Scalar> inverse(const Eigen::MatrixBase<Derived>& m,
                                         typename Derived::Scalar ridge) {
  using Scalar = typename Derived::Scalar;
  const auto pairs = eigendecompose(m);
  detail::require_positive_shifted(pairs, ridge, "inverse");
  return spectral_apply(pairs, [ridge](Scalar l) { return Scalar(1) / (l + ridge); });
}

/// Replaces every eigenvalue below `floor` by `floor`. Used to keep
/// rank-deficient estimates usable instead of rejecting them.
template <typename Derived>
Matrix<typename Derived::Scalar> floor_eigenvalues(const Eigen::MatrixBase<Derived>& m,
                                                   typename Derived::Scalar floor) {
  using Scalar = typename Derived::Scalar;
  const auto pairs = eigendecompose(m);
  return spectral_apply(pairs, [floor](Scalar l) { return l < floor ? floor : l; });
}

/// Eigenvalue-clipping PSD repair followed by the factor L = U sqrt(Λ+), so
/// that L L^T is the repaired matrix. Works for semi-definite input where a
/// plain Cholesky would fail.
template <typename Derived>
Matrix<typename Derived::Scalar> psd_factor(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto pairs = eigendecompose(m);
  Vector<Scalar> root(pairs.values.size());
  for (Eigen::Index k = 0; k < root.size(); ++k)
    root(k) = pairs.values(k) > Scalar(0) ? std::sqrt(pairs.values(k)) : Scalar(0);
  return pairs.vectors * root.asDiagonal();
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  return eigendecompose(m).values.minCoeff();
}

}  // namespace trendlab::symmat
