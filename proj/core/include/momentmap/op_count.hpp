#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace momentmap {

/// Floating-point operation counts (one multiply or one add each) of the
/// second-order covariance term on both paths, following the loop nests of
/// map_second_order_sqrt and map_second_order_full.
///
/// Square-root path, per CPD term: u_r = S_x v_r, the m quadratic forms
/// G2_i(u_r, u_r), and the scaling by beta_r / 2.
inline std::uint64_t sqrt_term_flops(std::uint64_t n, std::uint64_t m, std::uint64_t rank) {
  const std::uint64_t factor_product = 2 * n * n - n;
  const std::uint64_t quadratic_forms = m * (2 * n * n + 2 * n);
  const std::uint64_t scale = m + 1;
  return rank * (factor_product + quadratic_forms + scale);
}

/// Dense path: the Isserlis tensor plus the m x m contraction against it.
inline std::uint64_t dense_term_flops(std::uint64_t n, std::uint64_t m) {
  const std::uint64_t n4 = n * n * n * n;
  return 5 * n4 + m * m * (3 * n4 + 2);
}

/// n(n+1)/2: the rank of 3*I4 viewed as a map on symmetric n x n matrices,
/// which bounds the rank of any of its CPDs from below.
inline std::uint64_t cpd_rank_lower_bound(std::uint64_t n) { return n * (n + 1) / 2; }

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = double(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace momentmap
