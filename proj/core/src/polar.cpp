#include <cmath>
#include <string>

#include "momentmap/models.hpp"

namespace momentmap {

template <Real T>
Vector<T> polar_transform(const Vector<T>& xy) {
  if (xy.size() != 2) throw DimensionMismatch("polar_transform: input must be 2-dimensional");
  Vector<T> out(2);
  out(0) = std::sqrt(xy(0) * xy(0) + xy(1) * xy(1));
  out(1) = std::atan2(xy(1), xy(0));
  return out;
}

template <Real T>
SecondOrderModel<T> polar_model_at(const Vector<T>& m) {
  if (m.size() != 2) throw DimensionMismatch("polar_model_at: input must be 2-dimensional");
  require_finite(m, "polar_model_at");
  const T x = m(0);
  const T y = m(1);
  const T r2 = x * x + y * y;
  const T r = std::sqrt(r2);
  if (!(r >= T(1e-9))) {
    throw OriginSingularity("polar_model_at: |m| = " + std::to_string(double(r)) +
                            " is too close to the origin");
  }
  const T r3 = r2 * r;
  const T r4 = r2 * r2;

  Vector<T> value(2);
  value << r, std::atan2(y, x);

  Matrix<T> jac(2, 2);
  jac << x / r, y / r,
         -y / r2, x / r2;

  HessianStack<T> hess(2, 2);
  Matrix<T>& hr = hess.slice(0);
  hr << y * y / r3, -(x * y) / r3,
        -(x * y) / r3, x * x / r3;
  Matrix<T>& ht = hess.slice(1);
  const T cross = (y * y - x * x) / r4;
  ht << T(2) * x * y / r4, cross,
        cross, -(T(2) * x * y) / r4;

  return SecondOrderModel<T>(std::move(value), std::move(jac), std::move(hess));
}

template Vector<float> polar_transform<float>(const Vector<float>&);
template Vector<double> polar_transform<double>(const Vector<double>&);
template SecondOrderModel<float> polar_model_at<float>(const Vector<float>&);
template SecondOrderModel<double> polar_model_at<double>(const Vector<double>&);

}  // namespace momentmap
