#pragma once

#include "momentmap/cpd.hpp"
#include "momentmap/linalg.hpp"
#include "momentmap/model.hpp"
#include "momentmap/tensor.hpp"

namespace momentmap {

/// Gaussian belief held as (mean, lower Cholesky factor). This is what every
/// square-root map returns.
template <Real T>
struct GaussianSqrt {
  Vector<T> mean;
  LowerTriangular<T> chol;

  Matrix<T> covariance() const { return chol.product(); }
};

/// Gaussian input given by any square n x n root of its covariance
/// (P = root * root^T). Outputs are always canonicalized to Cholesky form,
/// inputs need not be.
template <Real T>
struct GaussianRoot {
  Vector<T> mean;
  Matrix<T> root;

  GaussianRoot(Vector<T> m, Matrix<T> r) : mean(std::move(m)), root(std::move(r)) {}
  GaussianRoot(const GaussianSqrt<T>& g) : mean(g.mean), root(g.chol.matrix()) {}  // NOLINT
};

/// Additive noise Gamma * w with w ~ N(0, root_w * root_w^T). A noiseless map
/// is an empty block (zero columns), not a zero matrix.
template <Real T>
struct NoiseSqrt {
  Matrix<T> gamma;   // m x n_w
  Matrix<T> root_w;  // n_w x n_w

  static NoiseSqrt none(Index m) { return {Matrix<T>(m, 0), Matrix<T>(0, 0)}; }
  Index out_dim() const noexcept { return gamma.rows(); }
};

template <Real T>
struct FullGaussian {
  Vector<T> mean;
  Matrix<T> cov;
};

/// Full-covariance form of NoiseSqrt: Gamma and P_w.
template <Real T>
struct NoiseCov {
  Matrix<T> gamma;
  Matrix<T> cov_w;

  static NoiseCov none(Index m) { return {Matrix<T>(m, 0), Matrix<T>(0, 0)}; }
  static NoiseCov from_sqrt(const NoiseSqrt<T>& s) {
    return {s.gamma, s.root_w * s.root_w.transpose()};
  }
};

/// First-order square-root map: mean g(m), factor from the QR of
/// [G1*S_x | Gamma*S_w]^T.
template <Real T>
GaussianSqrt<T> map_first_order_sqrt(const GaussianRoot<T>& x, const SecondOrderModel<T>& model,
                                     const NoiseSqrt<T>& noise);

/// dm_i = 1/2 G2_ijk (S S^T)_jk, computed column by column of S without
/// forming the covariance.
template <Real T>
Vector<T> second_order_mean_correction(const Matrix<T>& sqrt_cov, const HessianStack<T>& g2);

/// Second-order square-root map.
///
///   1. dm from second_order_mean_correction;
///   2. u_r = S_x v_r and p_r = (beta_r / 2) * G2(u_r, u_r) for each CPD term;
///   3. A = lower factor of [G1 S_x | p_1 ... p_R | Gamma S_w] (columns in that order);
///   4. S = chol_downdate(A, dm), mean = g(m) + dm.
///
/// The CPD (stored in binary64) is rounded to T once on entry; every other
/// operation runs in T. Throws DowndateBreaksDefiniteness if the
/// second-order covariance is not positive definite.
template <Real T>
GaussianSqrt<T> map_second_order_sqrt(const GaussianRoot<T>& x, const SecondOrderModel<T>& model,
                                      const NoiseSqrt<T>& noise, const CpdFactors& cpd);

/// Reference second-order map on full covariances (Gaussian input, Isserlis
/// fourth moment):
///   mean = g + dm,  cov = G1 P G1^T + Gamma P_w Gamma^T + dP - dm dm^T,
///   dP_ij = 1/4 G2_ikl G2_jpq (P_kl P_pq + P_kp P_lq + P_kq P_lp).
/// Noise enters once, through Gamma P_w Gamma^T. Cost is O(m^2 n^4).
template <Real T>
FullGaussian<T> map_second_order_full(const FullGaussian<T>& x, const SecondOrderModel<T>& model,
                                      const NoiseCov<T>& noise);

}  // namespace momentmap
