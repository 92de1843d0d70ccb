#pragma once

// Test-side reference computations. Nothing here calls the library's
// algorithms; everything is brute force, long double, or Eigen.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  Mat gaussian(Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  Vec unit_vector(Eigen::Index n) {
    Vec v = gaussian(n, 1);
    return v / v.norm();
  }

  Mat orthogonal(Eigen::Index n) {
    Eigen::HouseholderQR<Mat> qr(gaussian(n, n));
    return qr.householderQ();
  }

  // U diag(s) U^T with eigenvalues log-spaced from 1 to 1/condition.
  Mat spd(Eigen::Index n, double condition) {
    Vec s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : double(i) / double(n - 1);
      s(i) = std::pow(condition, -t);
    }
    const Mat u = orthogonal(n);
    Mat p = u * s.asDiagonal() * u.transpose();
    return 0.5 * (p + p.transpose());
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline Mat llt_factor(const Mat& p) {
  Eigen::LLT<Mat> llt(p);
  return llt.matrixL();
}

inline long double kd(int a, int b) { return a == b ? 1.0L : 0.0L; }

// Entry (k,l,p,q) of E[x x x x] for x ~ N(0, P), stored k-major in a flat vector.
inline std::vector<long double> isserlis(const Mat& p) {
  const int n = int(p.rows());
  std::vector<long double> out(std::size_t(n * n * n * n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const long double v = (long double)p(k, l) * p(a, b) + (long double)p(k, a) * p(l, b) +
                                (long double)p(k, b) * p(l, a);
          out[std::size_t(((k * n + l) * n + a) * n + b)] = v;
        }
  return out;
}

struct Moments {
  Vec mean;
  Mat cov;
};

// Second-order moments of y = g + G1 dx + 1/2 G2(dx, dx) + Gamma w, dx ~ N(0, P),
// w ~ N(0, Pw), accumulated in long double with plain nested loops.
inline Moments quadratic_moments(const Vec& g, const Mat& g1, const std::vector<Mat>& g2,
                                 const Mat& p, const Mat& gamma, const Mat& pw) {
  const int m = int(g1.rows());
  const int n = int(g1.cols());
  const auto m4 = isserlis(p);
  std::vector<long double> dm(std::size_t(m), 0.0L);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) dm[std::size_t(i)] += 0.5L * g2[std::size_t(i)](j, k) * p(j, k);

  MatL cov = MatL::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      long double acc = 0.0L;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) acc += (long double)g1(i, a) * p(a, b) * g1(j, b);
      for (int a = 0; a < gamma.cols(); ++a)
        for (int b = 0; b < gamma.cols(); ++b) acc += (long double)gamma(i, a) * pw(a, b) * gamma(j, b);
      long double quad = 0.0L;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              quad += (long double)g2[std::size_t(i)](k, l) * g2[std::size_t(j)](a, b) *
                      m4[std::size_t(((k * n + l) * n + a) * n + b)];
      cov(i, j) = acc + 0.25L * quad - dm[std::size_t(i)] * dm[std::size_t(j)];
    }

  Moments out;
  out.mean = Vec(m);
  for (int i = 0; i < m; ++i) out.mean(i) = double(g(i) + dm[std::size_t(i)]);
  out.cov = cov.cast<double>();
  return out;
}

}  // namespace oracle
