#include "momentmap/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace momentmap {

namespace {

using Perm = std::array<int, 4>;

const std::array<Perm, 24>& all_permutations() {
  static const std::array<Perm, 24> perms = [] {
    std::array<Perm, 24> out{};
    Perm p{0, 1, 2, 3};
    std::size_t i = 0;
    do {
      out[i++] = p;
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }();
  return perms;
}

// Neumaier compensated sum.
template <Real T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + carry_; }

 private:
  T sum_ = T(0);
  T carry_ = T(0);
};

template <class F>
void for_each_index(Index n, F&& f) {
  for (Index k = 0; k < n; ++k)
    for (Index l = 0; l < n; ++l)
      for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q) f(k, l, p, q);
}

}  // namespace

template <Real T>
T Tensor4<T>::frobenius_norm() const {
  T acc = T(0);
  for (T x : data_) acc += x * x;
  return std::sqrt(acc);
}

template <Real T>
T Tensor4<T>::max_asymmetry() const {
  T worst = T(0);
  for_each_index(n_, [&](Index k, Index l, Index p, Index q) {
    const std::array<Index, 4> idx{k, l, p, q};
    const T ref = (*this)(k, l, p, q);
    for (const Perm& pi : all_permutations()) {
      const T other = (*this)(idx[pi[0]], idx[pi[1]], idx[pi[2]], idx[pi[3]]);
      worst = std::max(worst, std::abs(ref - other));
    }
  });
  return worst;
}

template <Real T>
Tensor4<T>& Tensor4<T>::operator+=(const Tensor4& o) {
  if (o.n_ != n_) throw DimensionMismatch("Tensor4 +=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

template <Real T>
Tensor4<T>& Tensor4<T>::operator-=(const Tensor4& o) {
  if (o.n_ != n_) throw DimensionMismatch("Tensor4 -=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

template <Real T>
Tensor4<T>& Tensor4<T>::operator*=(T s) {
  for (T& x : data_) x *= s;
  return *this;
}

template <Real T>
T Tensor4<T>::contract4(const Vector<T>& u) const {
  if (u.size() != n_) throw DimensionMismatch("Tensor4::contract4: vector size");
  CompensatedSum<T> acc;
  for_each_index(n_, [&](Index k, Index l, Index p, Index q) {
    acc.add((*this)(k, l, p, q) * u(k) * u(l) * u(p) * u(q));
  });
  return acc.value();
}

template <Real T>
Vector<T> Tensor4<T>::contract3(const Vector<T>& u) const {
  if (u.size() != n_) throw DimensionMismatch("Tensor4::contract3: vector size");
  std::vector<CompensatedSum<T>> acc(static_cast<std::size_t>(n_));
  for_each_index(n_, [&](Index k, Index l, Index p, Index q) {
    acc[static_cast<std::size_t>(q)].add((*this)(k, l, p, q) * u(k) * u(l) * u(p));
  });
  Vector<T> out(n_);
  for (Index q = 0; q < n_; ++q) out(q) = acc[static_cast<std::size_t>(q)].value();
  return out;
}

template <Real T>
HessianStack<T>::HessianStack(std::vector<Matrix<T>> slices)
    : m_(static_cast<Index>(slices.size())), n_(slices.empty() ? 0 : slices.front().rows()),
      slices_(std::move(slices)) {
  for (const auto& s : slices_) {
    if (s.rows() != n_ || s.cols() != n_) {
      throw DimensionMismatch("HessianStack: every slice must be " + std::to_string(n_) + "x" +
                              std::to_string(n_));
    }
  }
}

template <Real T>
T HessianStack<T>::max_asymmetry() const {
  T worst = T(0);
  for (const auto& s : slices_) {
    if (s.size() > 0) worst = std::max(worst, (s - s.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

template <Real T>
T HessianStack<T>::max_abs() const {
  T worst = T(0);
  for (const auto& s : slices_) {
    if (s.size() > 0) worst = std::max(worst, s.cwiseAbs().maxCoeff());
  }
  return worst;
}

template <Real T>
Tensor4<T> identity_tensor4(Index n) {
  if (n < 1) throw DimensionMismatch("identity_tensor4: n must be >= 1");
  Tensor4<T> t(n);
  const T third = T(1) / T(3);
  for_each_index(n, [&](Index k, Index l, Index p, Index q) {
    const int hits = int(k == l && p == q) + int(k == p && l == q) + int(k == q && l == p);
    if (hits == 3) {
      t(k, l, p, q) = T(1);
    } else if (hits > 0) {
      t(k, l, p, q) = T(hits) * third;
    }
  });
  return t;
}

template <Real T>
Tensor4<T> symmetrize(const Tensor4<T>& t) {
  const Index n = t.dim();
  Tensor4<T> out(n);
  for_each_index(n, [&](Index k, Index l, Index p, Index q) {
    const std::array<Index, 4> idx{k, l, p, q};
    T acc = T(0);
    for (const Perm& pi : all_permutations()) {
      acc += t(idx[pi[0]], idx[pi[1]], idx[pi[2]], idx[pi[3]]);
    }
    out(k, l, p, q) = acc / T(24);
  });
  return out;
}

template <Real T>
Tensor4<T> isserlis_moment(const Matrix<T>& cov) {
  if (cov.rows() != cov.cols()) throw DimensionMismatch("isserlis_moment: covariance not square");
  const Index n = cov.rows();
  Tensor4<T> m(n);
  for_each_index(n, [&](Index k, Index l, Index p, Index q) {
    m(k, l, p, q) = cov(k, l) * cov(p, q) + cov(k, p) * cov(l, q) + cov(k, q) * cov(l, p);
  });
  return m;
}

template <Real T>
Tensor4<T> gaussian_fourth_central_moment(const Matrix<T>& sqrt_cov) {
  if (sqrt_cov.rows() != sqrt_cov.cols()) {
    throw DimensionMismatch("gaussian_fourth_central_moment: factor not square");
  }
  const Matrix<T> cov = sqrt_cov * sqrt_cov.transpose();
  return isserlis_moment<T>(cov);
}

template <Real T>
Tensor4<T> multilinear_transform(const Tensor4<T>& t, const Matrix<T>& s) {
  const Index n = t.dim();
  if (s.rows() != n || s.cols() != n) throw DimensionMismatch("multilinear_transform: factor size");
  // One mode at a time: each pass contracts the last index and rotates it to the front.
  Tensor4<T> cur = t;
  for (int mode = 0; mode < 4; ++mode) {
    Tensor4<T> next(n);
    for_each_index(n, [&](Index a, Index b, Index c, Index d) {
      T acc = T(0);
      for (Index e = 0; e < n; ++e) acc += s(a, e) * cur(b, c, d, e);
      next(a, b, c, d) = acc;
    });
    cur = std::move(next);
  }
  return cur;
}

template <Real T>
Vector<T> contract_hessian_quadratic(const HessianStack<T>& g2, const Vector<T>& u) {
  const Index n = g2.in_dim();
  if (u.size() != n) {
    throw DimensionMismatch("contract_hessian_quadratic: vector has " + std::to_string(u.size()) +
                            " entries, Hessian input dimension is " + std::to_string(n));
  }
  Vector<T> out(g2.out_dim());
  for (Index i = 0; i < g2.out_dim(); ++i) {
    const Matrix<T>& h = g2.slice(i);
    T acc = T(0);
    for (Index k = 0; k < n; ++k) {
      T row = T(0);
      for (Index l = 0; l < n; ++l) row += h(k, l) * u(l);
      acc += u(k) * row;
    }
    out(i) = acc;
  }
  return out;
}

#define MOMENTMAP_INSTANTIATE(T)                                                          \
  template class Tensor4<T>;                                                              \
  template class HessianStack<T>;                                                         \
  template Tensor4<T> identity_tensor4<T>(Index);                                         \
  template Tensor4<T> symmetrize<T>(const Tensor4<T>&);                                   \
  template Tensor4<T> isserlis_moment<T>(const Matrix<T>&);                               \
  template Tensor4<T> gaussian_fourth_central_moment<T>(const Matrix<T>&);                \
  template Tensor4<T> multilinear_transform<T>(const Tensor4<T>&, const Matrix<T>&);      \
  template Vector<T> contract_hessian_quadratic<T>(const HessianStack<T>&, const Vector<T>&);

MOMENTMAP_INSTANTIATE(float)
MOMENTMAP_INSTANTIATE(double)

#undef MOMENTMAP_INSTANTIATE

}  // namespace momentmap
