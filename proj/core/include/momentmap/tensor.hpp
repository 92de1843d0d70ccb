#pragma once

#include <vector>

#include "momentmap/linalg.hpp"

namespace momentmap {

/// Dense n x n x n x n tensor. Only used on oracle and verification paths
/// (n <= 6 or so); the square-root mapping never materializes one.
template <Real T>
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Index n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), T(0)) {}

  Index dim() const noexcept { return n_; }

  T& operator()(Index k, Index l, Index p, Index q) { return data_[offset(k, l, p, q)]; }
  T operator()(Index k, Index l, Index p, Index q) const { return data_[offset(k, l, p, q)]; }

  const std::vector<T>& data() const noexcept { return data_; }

  T frobenius_norm() const;

  // Largest |T(k,l,p,q) - T(perm)| over all 24 index permutations.
  T max_asymmetry() const;

  Tensor4& operator+=(const Tensor4& o);
  Tensor4& operator-=(const Tensor4& o);
  Tensor4& operator*=(T s);

  // Full contraction with four copies of u.
  T contract4(const Vector<T>& u) const;
  // Contraction of the first three modes with u; returns a vector.
  Vector<T> contract3(const Vector<T>& u) const;

 private:
  std::size_t offset(Index k, Index l, Index p, Index q) const {
    return static_cast<std::size_t>(((k * n_ + l) * n_ + p) * n_ + q);
  }

  Index n_ = 0;
  std::vector<T> data_;
};

template <Real T>
Tensor4<T> operator-(Tensor4<T> a, const Tensor4<T>& b) {
  a -= b;
  return a;
}

/// Second-derivative stack G2[i](j,k) = d^2 g_i / dx_j dx_k, one n x n slice
/// per output component.
template <Real T>
class HessianStack {
 public:
  HessianStack() = default;
  HessianStack(Index out_dim, Index in_dim)
      : m_(out_dim), n_(in_dim), slices_(static_cast<std::size_t>(out_dim), Matrix<T>::Zero(in_dim, in_dim)) {}
  explicit HessianStack(std::vector<Matrix<T>> slices);

  Index out_dim() const noexcept { return m_; }
  Index in_dim() const noexcept { return n_; }

  T& operator()(Index i, Index j, Index k) { return slices_[static_cast<std::size_t>(i)](j, k); }
  T operator()(Index i, Index j, Index k) const { return slices_[static_cast<std::size_t>(i)](j, k); }

  const Matrix<T>& slice(Index i) const { return slices_[static_cast<std::size_t>(i)]; }
  Matrix<T>& slice(Index i) { return slices_[static_cast<std::size_t>(i)]; }

  // max_i max|G[i] - G[i]^T|
  T max_asymmetry() const;
  T max_abs() const;

  template <Real U>
  HessianStack<U> cast() const {
    HessianStack<U> h(m_, n_);
    for (Index i = 0; i < m_; ++i) h.slice(i) = slice(i).template cast<U>();
    return h;
  }

 private:
  Index m_ = 0;
  Index n_ = 0;
  std::vector<Matrix<T>> slices_;
};

/// Fourth-order identity tensor, the symmetrization of I (x) I:
/// (d_kl d_pq + d_kp d_lq + d_kq d_lp) / 3.
template <Real T>
Tensor4<T> identity_tensor4(Index n);

/// Average of t over all 24 permutations of its indices.
template <Real T>
Tensor4<T> symmetrize(const Tensor4<T>& t);

/// Gaussian fourth central moment from the covariance (Isserlis):
/// M_klpq = P_kl P_pq + P_kp P_lq + P_kq P_lp.
template <Real T>
Tensor4<T> isserlis_moment(const Matrix<T>& cov);

/// Same moment starting from a square-root factor: P = S * S^T.
template <Real T>
Tensor4<T> gaussian_fourth_central_moment(const Matrix<T>& sqrt_cov);

/// Applies s along all four modes: out_klpq = s_ka s_lb s_pc s_qd t_abcd.
template <Real T>
Tensor4<T> multilinear_transform(const Tensor4<T>& t, const Matrix<T>& s);

/// result_i = sum_{k,l} G2[i](k,l) u_k u_l
template <Real T>
Vector<T> contract_hessian_quadratic(const HessianStack<T>& g2, const Vector<T>& u);

}  // namespace momentmap
