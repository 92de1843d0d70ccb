#include "momentmap/oracle_suite.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "momentmap/errors.hpp"
#include "momentmap/moment_maps.hpp"

namespace momentmap {

namespace {

class CaseRng {
 public:
  CaseRng(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    engine_.seed(seq);
  }

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(engine_); }

  Matrix<double> gaussian(Index rows, Index cols) {
    Matrix<double> m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  Matrix<double> orthogonal(Index n) {
    const Matrix<double> g = gaussian(n, n);
    Eigen::HouseholderQR<Matrix<double>> qr(g);
    Matrix<double> q = qr.householderQ();
    // Fix the column signs so the draw is Haar distributed.
    const Matrix<double> r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// U diag(s) V^T with singular values log-spaced from 1 down to 1/condition.
Matrix<double> conditioned_root(CaseRng& rng, Index n, double condition) {
  Vector<double> s(n);
  for (Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : double(i) / double(n - 1);
    s(i) = std::pow(condition, -t);
  }
  return rng.orthogonal(n) * s.asDiagonal() * rng.orthogonal(n).transpose();
}

OracleCase run_case(const OracleSuiteOptions& opts, int index) {
  CaseRng rng(opts.seed, index);
  OracleCase c;
  c.index = index;
  c.in_dim = rng.integer(1, opts.max_in_dim);
  c.out_dim = rng.integer(1, opts.max_out_dim);
  const Index n = c.in_dim;
  const Index m = c.out_dim;

  // Every tenth case sits at the condition cap; the rest are log-uniform.
  const double log_cap = std::log10(opts.max_condition);
  c.condition = n == 1 ? 1.0
                       : (index % 10 == 0 ? opts.max_condition
                                          : std::pow(10.0, rng.uniform(0.0, log_cap)));
  c.triangular_root = index % 2 == 1;

  const double scale = std::pow(10.0, rng.uniform(-1.0, 1.0));
  Matrix<double> root = scale * conditioned_root(rng, n, c.condition);
  if (c.triangular_root) root = cholesky<double>(root * root.transpose()).matrix();

  const Vector<double> mean = rng.gaussian(n, 1);
  const Vector<double> value = rng.gaussian(m, 1);
  const Matrix<double> jac = rng.gaussian(m, n);
  HessianStack<double> hess(m, n);
  for (Index i = 0; i < m; ++i) {
    const Matrix<double> g = rng.gaussian(n, n);
    hess.slice(i) = 0.5 * (g + g.transpose());
  }
  const SecondOrderModel<double> model(value, jac, hess);

  // Additive noise at a fixed fraction of the propagated spread keeps the
  // output covariance well conditioned when m > n.
  const Matrix<double> gamma = rng.gaussian(m, m);
  const double spread = (jac * root).norm() + 1e-3;
  const Matrix<double> root_w =
      0.1 * spread / std::sqrt(double(m)) * Matrix<double>::Identity(m, m);
  const NoiseSqrt<double> noise{gamma, root_w};

  try {
    const GaussianSqrt<double> sq =
        map_second_order_sqrt<double>({mean, root}, model, noise, standard_cpd(n));
    const FullGaussian<double> full = map_second_order_full<double>(
        {mean, root * root.transpose()}, model, NoiseCov<double>::from_sqrt(noise));

    const Matrix<double>& s = sq.chol.matrix();
    bool shape_ok = true;
    for (Index i = 0; i < m; ++i) {
      if (!(s(i, i) >= 0.0)) shape_ok = false;
      for (Index j = i + 1; j < m; ++j) {
        if (s(i, j) != 0.0) shape_ok = false;
      }
    }
    c.sqrt_factor_ok = shape_ok;
    c.cov_rel = (s * s.transpose() - full.cov).norm() / full.cov.norm();
    const LowerTriangular<double> ref = cholesky<double>(full.cov);
    c.chol_rel = (s - ref.matrix()).norm() / s.norm();
    c.passed = c.sqrt_factor_ok && c.cov_rel <= opts.cov_tol && c.chol_rel <= opts.chol_tol;
  } catch (const Error& e) {
    c.error = e.what();
    c.passed = false;
  }
  return c;
}

}  // namespace

const CpdFactors& standard_cpd(Index n) {
  static std::mutex mutex;
  static std::map<Index, CpdFactors> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  CpdFactors f;
  if (n <= 3) {
    f = cpd_analytic(n);
  } else {
    AlsOptions opts;
    opts.tol = 1e-12;
    f = cpd_rank_search(n, opts);
  }
  return cache.emplace(n, std::move(f)).first->second;
}

OracleSuiteResult run_oracle_suite(const OracleSuiteOptions& opts) {
  if (opts.cases < 0 || opts.max_in_dim < 1 || opts.max_out_dim < 1 || !(opts.max_condition >= 1.0)) {
    throw std::invalid_argument("run_oracle_suite: invalid options");
  }
  OracleSuiteResult result;
  result.cases.reserve(std::size_t(opts.cases));
  for (int i = 0; i < opts.cases; ++i) {
    OracleCase c = run_case(opts, i);
    result.worst_cov_rel = std::max(result.worst_cov_rel, c.cov_rel);
    result.worst_chol_rel = std::max(result.worst_chol_rel, c.chol_rel);
    if (!c.passed) ++result.failures;
    result.cases.push_back(std::move(c));
  }
  return result;
}

}  // namespace momentmap
