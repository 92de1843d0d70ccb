#pragma once

#include "momentmap/linalg.hpp"
#include "momentmap/tensor.hpp"

namespace momentmap {

/// Second-order Taylor data of g: R^n -> R^m at an expansion point:
/// the value g(m), the Jacobian G1 (m x n) and the Hessian stack G2.
template <Real T>
class SecondOrderModel {
 public:
  // Hessian slices are symmetrized on construction; asymmetry beyond 1e-8
  // relative to max|G2| is rejected with AsymmetricInput.
  SecondOrderModel(Vector<T> value, Matrix<T> jacobian, HessianStack<T> hessian);

  Index in_dim() const noexcept { return jacobian_.cols(); }
  Index out_dim() const noexcept { return jacobian_.rows(); }

  const Vector<T>& value() const noexcept { return value_; }
  const Matrix<T>& jacobian() const noexcept { return jacobian_; }
  const HessianStack<T>& hessian() const noexcept { return hessian_; }

  template <Real U>
  SecondOrderModel<U> cast() const {
    return SecondOrderModel<U>(value_.template cast<U>(), jacobian_.template cast<U>(),
                               hessian_.template cast<U>());
  }

 private:
  Vector<T> value_;
  Matrix<T> jacobian_;
  HessianStack<T> hessian_;
};

}  // namespace momentmap
