#pragma once

#include <string>

#include <Eigen/Core>

#include "momentmap/errors.hpp"
#include "momentmap/precision.hpp"

namespace momentmap {

using Index = Eigen::Index;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Square lower-triangular matrix with a nonnegative diagonal, the carrier
/// for Cholesky factors. The invariant is checked on every construction, so
/// holding one of these is proof the factor is in canonical form.
template <Real T>
class LowerTriangular {
 public:
  LowerTriangular() = default;

  // Throws DimensionMismatch (non-square), NonFiniteInput, or FailedInvariant
  // (nonzero strict upper part or negative diagonal).
  explicit LowerTriangular(Matrix<T> m);

  static LowerTriangular identity(Index n);
  static LowerTriangular diagonal(const Vector<T>& d);

  Index dim() const noexcept { return m_.rows(); }
  const Matrix<T>& matrix() const noexcept { return m_; }
  T operator()(Index i, Index j) const { return m_(i, j); }

  // S * S^T, evaluated in T.
  Matrix<T> product() const;

  template <Real U>
  LowerTriangular<U> cast() const {
    return LowerTriangular<U>(m_.template cast<U>());
  }

 private:
  Matrix<T> m_;
};

// Throws NonFiniteInput if any entry is NaN or infinite.
template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw NonFiniteInput(std::string(what) + ": non-finite entry");
  }
}

/// Cholesky factor of a symmetric positive-definite matrix, every operation
/// carried out in T. Input asymmetry above 10*u*max|A| is rejected, anything
/// below that is averaged away before factoring.
template <Real T>
LowerTriangular<T> cholesky(const Matrix<T>& a);

/// Rank-1 downdate: returns B with B*B^T = S*S^T - v*v^T without forming
/// either product. Forward-solves w = S^-1 v, then sweeps Givens rotations
/// (the LINPACK/Stewart scheme, transposed for lower factors). Throws
/// DowndateBreaksDefiniteness when 1 - |w|^2 <= u.
template <Real T>
LowerTriangular<T> chol_downdate(const LowerTriangular<T>& s, const Vector<T>& v);

/// Triangular factor R of a Householder QR of b (k x n, any k). Rows of R
/// are sign-normalized so the diagonal is nonnegative; rank-deficient inputs
/// yield zero diagonal entries rather than an error. Result is n x n.
template <Real T>
Matrix<T> qr_r(const Matrix<T>& b);

/// Lower Cholesky factor of W*W^T computed as qr_r(W^T)^T.
template <Real T>
LowerTriangular<T> triangularize_sqrt(const Matrix<T>& w);

}  // namespace momentmap
