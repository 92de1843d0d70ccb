#include "momentmap/cpd.hpp"

#include <Eigen/QR>

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace momentmap {

namespace {

// Correctly rounded binary64 constants.
constexpr double kBeta2 = 1.632993161855452;     // sqrt(8/3)
constexpr double kBeta3 = 1.5811388300841898;    // sqrt(5/2)
constexpr double kHalfSqrt3 = 0.8660254037844386;
// (1, phi) / sqrt(1 + phi^2)
constexpr double kIcoA = 0.5257311121191336;
constexpr double kIcoB = 0.8506508083520399;

// 3*I4 with exact integer entries (the standard-normal fourth moment).
Tensor4<double> scaled_identity(Index n) {
  return isserlis_moment<double>(Matrix<double>::Identity(n, n));
}

// M(i, r) = sum_{jkl} T(i,j,k,l) B(j,r) C(k,r) D(l,r)
Matrix<double> mttkrp(const Tensor4<double>& t, const Matrix<double>& b, const Matrix<double>& c,
                      const Matrix<double>& d) {
  const Index n = t.dim();
  const Index rank = b.cols();
  Matrix<double> m = Matrix<double>::Zero(n, rank);
  for (Index r = 0; r < rank; ++r) {
    for (Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k)
          for (Index l = 0; l < n; ++l) acc += t(i, j, k, l) * b(j, r) * c(k, r) * d(l, r);
      m(i, r) = acc;
    }
  }
  return m;
}

double residual_of(const Tensor4<double>& target, const Vector<double>& lambda,
                   const Matrix<double>& a) {
  const Index n = target.dim();
  double acc = 0.0;
  for (Index k = 0; k < n; ++k)
    for (Index l = 0; l < n; ++l)
      for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q) {
          double x = 0.0;
          for (Index r = 0; r < a.cols(); ++r) x += lambda(r) * a(k, r) * a(l, r) * a(p, r) * a(q, r);
          const double e = x - target(k, l, p, q);
          acc += e * e;
        }
  return std::sqrt(acc);
}

Matrix<double> random_unit_columns(Index n, Index rank, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<double> a(n, rank);
  for (Index r = 0; r < rank; ++r) {
    double nrm = 0.0;
    do {
      for (Index i = 0; i < n; ++i) a(i, r) = normal(rng);
      nrm = a.col(r).norm();
    } while (nrm == 0.0);
    a.col(r) /= nrm;
  }
  return a;
}

struct RestartResult {
  double residual = std::numeric_limits<double>::infinity();
  bool symmetric = false;
  Vector<double> lambda;
  Matrix<double> a;
};

// Least-squares weights for fixed unit factors: (A^T A)^{.4} lambda = 3 * 1,
// since <a_r^{(x)4}, 3*I4> = 3 |a_r|^4 = 3.
Vector<double> fit_weights(const Matrix<double>& a) {
  const Matrix<double> gram = a.transpose() * a;
  const Matrix<double> g4 = gram.array().square().square().matrix();
  const Vector<double> rhs = Vector<double>::Constant(a.cols(), 3.0);
  return g4.completeOrthogonalDecomposition().solve(rhs);
}

RestartResult run_restart(const Tensor4<double>& target, Index rank, const AlsOptions& opts,
                          std::mt19937_64& rng) {
  const Index n = target.dim();
  std::array<Matrix<double>, 4> factors;
  for (auto& f : factors) f = random_unit_columns(n, rank, rng);

  RestartResult out;
  out.lambda = Vector<double>::Ones(rank);
  const double floor = 1e-14 * target.frobenius_norm();
  double prev = std::numeric_limits<double>::infinity();

  for (int it = 0; it < opts.max_iter; ++it) {
    for (int mode = 0; mode < 4; ++mode) {
      const auto& b = factors[(mode + 1) % 4];
      const auto& c = factors[(mode + 2) % 4];
      const auto& d = factors[(mode + 3) % 4];
      // T is super-symmetric, so every mode unfolding is the same matrix.
      const Matrix<double> m = mttkrp(target, b, c, d);
      const Matrix<double> gram = ((b.transpose() * b).array() * (c.transpose() * c).array() *
                                   (d.transpose() * d).array())
                                      .matrix();
      Matrix<double> x = gram.completeOrthogonalDecomposition().solve(m.transpose()).transpose();
      for (Index r = 0; r < rank; ++r) {
        const double nrm = x.col(r).norm();
        if (nrm > 0.0 && std::isfinite(nrm)) factors[mode].col(r) = x.col(r) / nrm;
      }
    }

    // Sign-align every mode to mode 0, then average into one symmetric factor.
    Matrix<double> avg = factors[0];
    for (int mode = 1; mode < 4; ++mode) {
      for (Index r = 0; r < rank; ++r) {
        const double s = factors[mode].col(r).dot(factors[0].col(r)) < 0.0 ? -1.0 : 1.0;
        avg.col(r) += s * factors[mode].col(r);
      }
    }
    for (Index r = 0; r < rank; ++r) {
      const double nrm = avg.col(r).norm();
      if (nrm > 0.0) {
        avg.col(r) /= nrm;
      } else {
        avg.col(r) = factors[0].col(r);
      }
    }
    for (auto& f : factors) f = avg;

    out.lambda = fit_weights(avg);
    out.a = avg;
    const double res = residual_of(target, out.lambda, avg);
    out.residual = res;
    if (!std::isfinite(res)) break;
    if (res <= floor) break;
    if (std::abs(prev - res) < opts.stall_tol * res) break;
    prev = res;
  }
  out.symmetric = (out.lambda.array() > 0.0).all();
  return out;
}

}  // namespace

void CpdFactors::validate() const {
  if (dim < 1 || rank < 1) {
    throw FailedInvariant("CpdFactors: dim and rank must be positive");
  }
  if (static_cast<Index>(betas.size()) != rank || vectors.rows() != dim || vectors.cols() != rank) {
    throw FailedInvariant("CpdFactors: sizes disagree with dim/rank");
  }
  for (Index r = 0; r < rank; ++r) {
    const double b = betas[static_cast<std::size_t>(r)];
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw FailedInvariant("CpdFactors: beta_" + std::to_string(r) + " is not positive");
    }
    if (!vectors.col(r).allFinite()) {
      throw FailedInvariant("CpdFactors: non-finite factor " + std::to_string(r));
    }
    const double nrm = vectors.col(r).norm();
    if (std::abs(nrm - 1.0) > 1e-15) {
      throw FailedInvariant("CpdFactors: factor " + std::to_string(r) + " has norm " +
                            std::to_string(nrm));
    }
  }
}

Vector<double> CpdFactors::beta_vector() const {
  return Eigen::Map<const Vector<double>>(betas.data(), static_cast<Index>(betas.size()));
}

CpdFactors cpd_analytic(Index n) {
  CpdFactors f;
  f.dim = n;
  f.generator = "analytic";
  switch (n) {
    case 1:
      f.rank = 1;
      f.betas = {std::sqrt(3.0)};
      f.vectors = Matrix<double>::Ones(1, 1);
      break;
    case 2:
      f.rank = 3;
      f.betas.assign(3, kBeta2);
      f.vectors.resize(2, 3);
      f.vectors << 1.0, -0.5, -0.5,
                   0.0, kHalfSqrt3, -kHalfSqrt3;
      break;
    case 3:
      // One vertex from each antipodal pair of the icosahedron: z > 0, then
      // z == 0 with y > 0.
      f.rank = 6;
      f.betas.assign(6, kBeta3);
      f.vectors.resize(3, 6);
      f.vectors << 0.0,    0.0,    kIcoB, -kIcoB, kIcoA, -kIcoA,
                   kIcoA, -kIcoA,  0.0,    0.0,   kIcoB,  kIcoB,
                   kIcoB,  kIcoB,  kIcoA,  kIcoA, 0.0,    0.0;
      break;
    default:
      throw UnsupportedDimension("cpd_analytic: no closed form for n = " + std::to_string(n) +
                                 "; use cpd_als");
  }
  f.residual = verify_cpd(f);
  return f;
}

CpdFactors cpd_als(Index n, Index rank, const AlsOptions& opts) {
  if (n < 2) throw UnsupportedDimension("cpd_als: n must be >= 2");
  if (rank < 1) throw UnsupportedDimension("cpd_als: rank must be >= 1");

  const Tensor4<double> target = scaled_identity(n);

  RestartResult best;
  bool have_best = false;
  bool asym_failure = false;
  double best_any = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < opts.restarts; ++restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    RestartResult res = run_restart(target, rank, opts, rng);
    best_any = std::min(best_any, res.residual);
    if (!res.symmetric) {
      if (res.residual <= opts.tol) asym_failure = true;
      continue;
    }
    // Strict '<' keeps the lowest restart index on ties.
    if (!have_best || res.residual < best.residual) {
      best = std::move(res);
      have_best = true;
    }
  }

  if (have_best) {
    CpdFactors f;
    f.dim = n;
    f.rank = rank;
    f.generator = "als";
    f.seed = opts.seed;
    f.vectors = best.a;
    f.betas.resize(static_cast<std::size_t>(rank));
    for (Index r = 0; r < rank; ++r) {
      const double nrm = f.vectors.col(r).norm();
      f.vectors.col(r) /= nrm;
      f.betas[static_cast<std::size_t>(r)] = std::sqrt(best.lambda(r)) * nrm * nrm;
    }
    f.residual = verify_cpd(f);
    if (f.residual <= opts.tol) {
      f.validate();
      return f;
    }
    best_any = std::min(best_any, f.residual);
  }

  throw NoConvergence("cpd_als: n = " + std::to_string(n) + ", rank = " + std::to_string(rank) +
                          " did not reach tol " + std::to_string(opts.tol) +
                          " (best residual " + std::to_string(best_any) + ")" +
                          (asym_failure ? "; a restart converged only to a non-symmetric solution"
                                        : ""),
                      best_any, asym_failure);
}

CpdFactors cpd_rank_search(Index n, const AlsOptions& opts, Index max_rank) {
  const Index start = n * (n + 1) / 2;
  if (max_rank <= 0) max_rank = n * (n + 1) * (n + 2) * (n + 3) / 24;
  double best = std::numeric_limits<double>::infinity();
  bool asym = false;
  for (Index rank = start; rank <= max_rank; ++rank) {
    try {
      return cpd_als(n, rank, opts);
    } catch (const NoConvergence& e) {
      best = std::min(best, e.best_residual());
      asym = asym || e.symmetrization_failed();
    }
  }
  throw NoConvergence("cpd_rank_search: no rank in [" + std::to_string(start) + ", " +
                          std::to_string(max_rank) + "] reached tol " + std::to_string(opts.tol),
                      best, asym);
}

Tensor4<double> reconstruct(const CpdFactors& f) {
  const Index n = f.dim;
  Tensor4<double> t(n);
  for (Index r = 0; r < f.rank; ++r) {
    const double b = f.betas[static_cast<std::size_t>(r)];
    const double w = b * b;
    const auto v = f.vectors.col(r);
    for (Index k = 0; k < n; ++k)
      for (Index l = 0; l < n; ++l)
        for (Index p = 0; p < n; ++p)
          for (Index q = 0; q < n; ++q) t(k, l, p, q) += w * v(k) * v(l) * v(p) * v(q);
  }
  return t;
}

double verify_cpd(const CpdFactors& f) {
  Tensor4<double> diff = reconstruct(f);
  diff -= scaled_identity(f.dim);
  return diff.frobenius_norm();
}

}  // namespace momentmap
