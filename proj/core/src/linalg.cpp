#include "momentmap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace momentmap {

namespace {

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

template <Real T>
LowerTriangular<T>::LowerTriangular(Matrix<T> m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw DimensionMismatch("LowerTriangular: matrix is " + std::to_string(m_.rows()) + "x" +
                            std::to_string(m_.cols()));
  }
  require_finite(m_, "LowerTriangular");
  for (Index i = 0; i < m_.rows(); ++i) {
    if (m_(i, i) < T(0)) {
      throw FailedInvariant("LowerTriangular: negative diagonal at " + std::to_string(i));
    }
    for (Index j = i + 1; j < m_.cols(); ++j) {
      if (m_(i, j) != T(0)) {
        throw FailedInvariant("LowerTriangular: nonzero strict upper entry (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
    }
  }
}

template <Real T>
LowerTriangular<T> LowerTriangular<T>::identity(Index n) {
  return LowerTriangular(Matrix<T>::Identity(n, n));
}

template <Real T>
LowerTriangular<T> LowerTriangular<T>::diagonal(const Vector<T>& d) {
  return LowerTriangular(Matrix<T>(d.asDiagonal()));
}

template <Real T>
Matrix<T> LowerTriangular<T>::product() const {
  return m_ * m_.transpose();
}

template <Real T>
LowerTriangular<T> cholesky(const Matrix<T>& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("cholesky: input is not square");
  }
  require_finite(a, "cholesky");
  const Index n = a.rows();

  const T scale = a.cwiseAbs().maxCoeff();
  const T asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > T(10) * unit_roundoff<T>() * scale) {
    throw AsymmetricInput("cholesky: max|A - A^T| = " + format_g(double(asym)) +
                          " exceeds tolerance");
  }

  Matrix<T> sym(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      sym(i, j) = (a(i, j) + a(j, i)) * T(0.5);
    }
  }

  Matrix<T> l = Matrix<T>::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    T d = sym(j, j);
    for (Index k = 0; k < j; ++k) {
      d -= l(j, k) * l(j, k);
    }
    if (!(d > T(0))) {
      throw NotPositiveDefinite("cholesky: nonpositive pivot " + std::to_string(double(d)) +
                                " at column " + std::to_string(j));
    }
    const T ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      T s = sym(i, j);
      for (Index k = 0; k < j; ++k) {
        s -= l(i, k) * l(j, k);
      }
      l(i, j) = s / ljj;
    }
  }
  return LowerTriangular<T>(std::move(l));
}

template <Real T>
LowerTriangular<T> chol_downdate(const LowerTriangular<T>& s, const Vector<T>& v) {
  const Index n = s.dim();
  if (v.size() != n) {
    throw DimensionMismatch("chol_downdate: vector has " + std::to_string(v.size()) +
                            " entries, factor is " + std::to_string(n) + "x" + std::to_string(n));
  }
  require_finite(v, "chol_downdate");

  const Matrix<T>& l = s.matrix();

  // w = S^-1 v
  Vector<T> w(n);
  // On a zero pivot the residual of the solve is the part of v outside the
  // range of S. Dropping it perturbs S*S^T - v*v^T by about 2*|r|*|v|, which is
  // tolerated while it stays within the backward error of the downdate itself.
  const T v_norm = v.norm();
  const T range_tol =
      v_norm > T(0) ? T(10 * n) * unit_roundoff<T>() * l.squaredNorm() / v_norm : T(0);
  for (Index i = 0; i < n; ++i) {
    T acc = v(i);
    for (Index k = 0; k < i; ++k) {
      acc -= l(i, k) * w(k);
    }
    if (l(i, i) == T(0)) {
      if (std::abs(acc) > range_tol) {
        throw DowndateBreaksDefiniteness(
            "chol_downdate: v has a component outside the range of S",
            std::numeric_limits<double>::infinity());
      }
      w(i) = T(0);
    } else {
      w(i) = acc / l(i, i);
    }
  }

  T norm_sq = T(0);
  for (Index i = 0; i < n; ++i) {
    norm_sq += w(i) * w(i);
  }
  const T margin = T(1) - norm_sq;
  if (!(margin > unit_roundoff<T>())) {
    throw DowndateBreaksDefiniteness(
        "chol_downdate: |S^-1 v|^2 = " + std::to_string(double(norm_sq)) + " (need < 1)",
        double(norm_sq));
  }

  // Rotations that fold w into alpha, from the last index to the first.
  Vector<T> c(n);
  Vector<T> sn(n);
  T alpha = std::sqrt(margin);
  for (Index i = n - 1; i >= 0; --i) {
    const T scale = alpha + std::abs(w(i));
    const T a = alpha / scale;
    const T b = w(i) / scale;
    const T nrm = std::sqrt(a * a + b * b);
    c(i) = a / nrm;
    sn(i) = b / nrm;
    alpha = scale * nrm;
  }

  // Row j of the lower factor is column j of the LINPACK upper factor.
  Matrix<T> out = l;
  for (Index j = 0; j < n; ++j) {
    T xx = T(0);
    for (Index i = j; i >= 0; --i) {
      const T t = c(i) * xx + sn(i) * out(j, i);
      out(j, i) = c(i) * out(j, i) - sn(i) * xx;
      xx = t;
    }
  }

  // Canonical form: nonnegative diagonal. Negating a column leaves B*B^T unchanged.
  for (Index j = 0; j < n; ++j) {
    if (out(j, j) < T(0)) {
      out.col(j) = -out.col(j);
    }
  }
  require_finite(out, "chol_downdate result");
  return LowerTriangular<T>(std::move(out));
}

template <Real T>
Matrix<T> qr_r(const Matrix<T>& b) {
  require_finite(b, "qr_r");
  const Index rows = b.rows();
  const Index cols = b.cols();
  Matrix<T> a = b;

  const Index steps = std::min(rows, cols);
  for (Index j = 0; j < steps; ++j) {
    T norm = T(0);
    for (Index i = j; i < rows; ++i) {
      norm = std::hypot(norm, a(i, j));
    }
    if (norm == T(0)) {
      continue;
    }
    const T x0 = a(j, j);
    const T alpha = x0 >= T(0) ? -norm : norm;
    const T v0 = x0 - alpha;
    // v = [v0, a(j+1:, j)], and v^T v = -2 * alpha * v0.
    const T vtv = T(-2) * alpha * v0;

    for (Index c = j + 1; c < cols; ++c) {
      T dot = v0 * a(j, c);
      for (Index i = j + 1; i < rows; ++i) {
        dot += a(i, j) * a(i, c);
      }
      const T f = T(2) * dot / vtv;
      a(j, c) -= f * v0;
      for (Index i = j + 1; i < rows; ++i) {
        a(i, c) -= f * a(i, j);
      }
    }
    a(j, j) = alpha;
    for (Index i = j + 1; i < rows; ++i) {
      a(i, j) = T(0);
    }
  }

  Matrix<T> r = Matrix<T>::Zero(cols, cols);
  for (Index i = 0; i < steps; ++i) {
    for (Index c = i; c < cols; ++c) {
      r(i, c) = a(i, c);
    }
    if (r(i, i) < T(0)) {
      r.row(i) = -r.row(i);
    }
  }
  return r;
}

template <Real T>
LowerTriangular<T> triangularize_sqrt(const Matrix<T>& w) {
  Matrix<T> r = qr_r<T>(w.transpose());
  return LowerTriangular<T>(r.transpose());
}

#define MOMENTMAP_INSTANTIATE(T)                                                   \
  template class LowerTriangular<T>;                                               \
  template LowerTriangular<T> cholesky<T>(const Matrix<T>&);                       \
  template LowerTriangular<T> chol_downdate<T>(const LowerTriangular<T>&,          \
                                               const Vector<T>&);                  \
  template Matrix<T> qr_r<T>(const Matrix<T>&);                                    \
  template LowerTriangular<T> triangularize_sqrt<T>(const Matrix<T>&);

MOMENTMAP_INSTANTIATE(float)
MOMENTMAP_INSTANTIATE(double)

#undef MOMENTMAP_INSTANTIATE

}  // namespace momentmap
