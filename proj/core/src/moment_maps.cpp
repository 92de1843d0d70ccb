#include "momentmap/moment_maps.hpp"

#include <string>

namespace momentmap {

namespace {

template <Real T>
void check_input(const GaussianRoot<T>& x, const SecondOrderModel<T>& model, const char* where) {
  const Index n = model.in_dim();
  if (x.mean.size() != n || x.root.rows() != n || x.root.cols() != n) {
    throw DimensionMismatch(std::string(where) + ": input is " + std::to_string(x.mean.size()) +
                            "-dimensional with a " + std::to_string(x.root.rows()) + "x" +
                            std::to_string(x.root.cols()) + " root, model expects n = " +
                            std::to_string(n));
  }
  require_finite(x.mean, where);
  require_finite(x.root, where);
}

template <Real T>
void check_noise(Index m, const Matrix<T>& gamma, const Matrix<T>& w, const char* where) {
  if (gamma.rows() != m || gamma.cols() != w.rows() || w.rows() != w.cols()) {
    throw DimensionMismatch(std::string(where) + ": noise block is " +
                            std::to_string(gamma.rows()) + "x" + std::to_string(gamma.cols()) +
                            " with a " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                            " noise matrix, output dimension is " + std::to_string(m));
  }
  require_finite(gamma, where);
  require_finite(w, where);
}

}  // namespace

template <Real T>
GaussianSqrt<T> map_first_order_sqrt(const GaussianRoot<T>& x, const SecondOrderModel<T>& model,
                                     const NoiseSqrt<T>& noise) {
  check_input(x, model, "map_first_order_sqrt");
  check_noise(model.out_dim(), noise.gamma, noise.root_w, "map_first_order_sqrt");

  const Index n = model.in_dim();
  const Index m = model.out_dim();
  const Index nw = noise.gamma.cols();

  Matrix<T> block(m, n + nw);
  block.leftCols(n) = model.jacobian() * x.root;
  block.rightCols(nw) = noise.gamma * noise.root_w;

  return {model.value(), triangularize_sqrt<T>(block)};
}

template <Real T>
Vector<T> second_order_mean_correction(const Matrix<T>& sqrt_cov, const HessianStack<T>& g2) {
  const Index n = g2.in_dim();
  if (sqrt_cov.rows() != n || sqrt_cov.cols() != n) {
    throw DimensionMismatch("second_order_mean_correction: factor is " +
                            std::to_string(sqrt_cov.rows()) + "x" +
                            std::to_string(sqrt_cov.cols()) + ", Hessian input dimension " +
                            std::to_string(n));
  }
  // G2_ijk S_jl S_kl = sum_l G2_i(s_l, s_l) with s_l the l-th column of S.
  Vector<T> acc = Vector<T>::Zero(g2.out_dim());
  for (Index l = 0; l < n; ++l) {
    acc += contract_hessian_quadratic<T>(g2, sqrt_cov.col(l));
  }
  return acc * T(0.5);
}

template <Real T>
GaussianSqrt<T> map_second_order_sqrt(const GaussianRoot<T>& x, const SecondOrderModel<T>& model,
                                      const NoiseSqrt<T>& noise, const CpdFactors& cpd) {
  check_input(x, model, "map_second_order_sqrt");
  check_noise(model.out_dim(), noise.gamma, noise.root_w, "map_second_order_sqrt");
  const Index n = model.in_dim();
  const Index m = model.out_dim();
  if (cpd.dim != n) {
    throw DimensionMismatch("map_second_order_sqrt: CPD is for n = " + std::to_string(cpd.dim) +
                            ", input has n = " + std::to_string(n));
  }

  const Index rank = cpd.rank;
  const Index nw = noise.gamma.cols();
  const Matrix<T> factors = cpd.vectors.template cast<T>();
  const Vector<T> betas = cpd.beta_vector().template cast<T>();

  const Vector<T> dm = second_order_mean_correction<T>(x.root, model.hessian());

  Matrix<T> block(m, n + rank + nw);
  block.leftCols(n) = model.jacobian() * x.root;
  for (Index r = 0; r < rank; ++r) {
    const Vector<T> u = x.root * factors.col(r);
    const T half_beta = T(0.5) * betas(r);
    block.col(n + r) = half_beta * contract_hessian_quadratic<T>(model.hessian(), u);
  }
  block.rightCols(nw) = noise.gamma * noise.root_w;

  const LowerTriangular<T> a = triangularize_sqrt<T>(block);
  LowerTriangular<T> chol = chol_downdate<T>(a, dm);
  return {model.value() + dm, std::move(chol)};
}

template <Real T>
FullGaussian<T> map_second_order_full(const FullGaussian<T>& x, const SecondOrderModel<T>& model,
                                      const NoiseCov<T>& noise) {
  const Index n = model.in_dim();
  const Index m = model.out_dim();
  if (x.mean.size() != n || x.cov.rows() != n || x.cov.cols() != n) {
    throw DimensionMismatch("map_second_order_full: input dimension does not match the model");
  }
  require_finite(x.cov, "map_second_order_full");
  check_noise(m, noise.gamma, noise.cov_w, "map_second_order_full");

  const Matrix<T>& p = x.cov;
  const HessianStack<T>& g2 = model.hessian();
  const Matrix<T>& g1 = model.jacobian();

  Vector<T> dm(m);
  for (Index i = 0; i < m; ++i) {
    T acc = T(0);
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) acc += g2(i, j, k) * p(j, k);
    dm(i) = T(0.5) * acc;
  }

  Matrix<T> cov = g1 * p * g1.transpose();
  if (noise.gamma.cols() > 0) {
    cov += noise.gamma * noise.cov_w * noise.gamma.transpose();
  }

  const Tensor4<T> moment = isserlis_moment<T>(p);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      T acc = T(0);
      for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l)
          for (Index q1 = 0; q1 < n; ++q1)
            for (Index q2 = 0; q2 < n; ++q2)
              acc += g2(i, k, l) * g2(j, q1, q2) * moment(k, l, q1, q2);
      cov(i, j) += T(0.25) * acc;
    }
  }
  cov -= dm * dm.transpose();

  // Same (A + A^T) / 2 that cholesky applies; the raw products can be
  // asymmetric beyond its input tolerance when G1 P G1^T cancels.
  const Matrix<T> sym = (cov + cov.transpose()) * T(0.5);
  return {model.value() + dm, sym};
}

#define MOMENTMAP_INSTANTIATE(T)                                                              \
  template GaussianSqrt<T> map_first_order_sqrt<T>(const GaussianRoot<T>&,                    \
                                                   const SecondOrderModel<T>&,                \
                                                   const NoiseSqrt<T>&);                      \
  template Vector<T> second_order_mean_correction<T>(const Matrix<T>&, const HessianStack<T>&); \
  template GaussianSqrt<T> map_second_order_sqrt<T>(const GaussianRoot<T>&,                   \
                                                    const SecondOrderModel<T>&,               \
                                                    const NoiseSqrt<T>&, const CpdFactors&);  \
  template FullGaussian<T> map_second_order_full<T>(const FullGaussian<T>&,                   \
                                                    const SecondOrderModel<T>&,               \
                                                    const NoiseCov<T>&);

MOMENTMAP_INSTANTIATE(float)
MOMENTMAP_INSTANTIATE(double)

#undef MOMENTMAP_INSTANTIATE

}  // namespace momentmap
