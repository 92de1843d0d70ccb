#include "momentmap/model.hpp"

#include <string>

namespace momentmap {

template <Real T>
SecondOrderModel<T>::SecondOrderModel(Vector<T> value, Matrix<T> jacobian, HessianStack<T> hessian)
    : value_(std::move(value)), jacobian_(std::move(jacobian)), hessian_(std::move(hessian)) {
  const Index m = jacobian_.rows();
  const Index n = jacobian_.cols();
  if (value_.size() != m) {
    throw DimensionMismatch("SecondOrderModel: value has " + std::to_string(value_.size()) +
                            " entries, Jacobian has " + std::to_string(m) + " rows");
  }
  if (hessian_.out_dim() != m || hessian_.in_dim() != n) {
    throw DimensionMismatch("SecondOrderModel: Hessian stack is " +
                            std::to_string(hessian_.out_dim()) + "x" +
                            std::to_string(hessian_.in_dim()) + ", expected " + std::to_string(m) +
                            "x" + std::to_string(n));
  }
  require_finite(value_, "SecondOrderModel value");
  require_finite(jacobian_, "SecondOrderModel Jacobian");
  for (Index i = 0; i < m; ++i) require_finite(hessian_.slice(i), "SecondOrderModel Hessian");

  const T scale = hessian_.max_abs();
  if (hessian_.max_asymmetry() > T(1e-8) * scale) {
    throw AsymmetricInput("SecondOrderModel: Hessian slices are not symmetric");
  }
  for (Index i = 0; i < m; ++i) {
    Matrix<T>& h = hessian_.slice(i);
    for (Index j = 0; j < n; ++j) {
      for (Index k = j + 1; k < n; ++k) {
        const T avg = (h(j, k) + h(k, j)) * T(0.5);
        h(j, k) = avg;
        h(k, j) = avg;
      }
    }
  }
}

template class SecondOrderModel<float>;
template class SecondOrderModel<double>;

}  // namespace momentmap
