#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "momentmap/linalg.hpp"
#include "momentmap/tensor.hpp"

namespace momentmap {

/// Rank-R symmetric CPD of 3*I4:  3*I4 = sum_r beta_r^2 * v_r^{(x)4}.
///
/// beta_r = sqrt(3 w_r) is kept directly in binary64 and never recomputed
/// from the identity-tensor weights at runtime. Columns of `vectors` are the
/// unit factors v_r.
struct CpdFactors {
  Index dim = 0;
  Index rank = 0;
  std::vector<double> betas;
  Matrix<double> vectors;  // dim x rank
  double residual = 0.0;   // as recorded by the generator
  std::string generator;   // "analytic" or "als"
  std::uint64_t seed = 0;

  // Throws FailedInvariant unless sizes agree, every beta is positive and
  // finite, and every column has unit norm to 1e-15.
  void validate() const;

  Vector<double> beta_vector() const;
};

/// Closed-form factors for n = 1 (scalar), n = 2 (equilateral triangle,
/// first vertex at (1,0)) and n = 3 (icosahedron half-vertices), all with
/// uniform weights. Throws UnsupportedDimension for any other n.
CpdFactors cpd_analytic(Index n);

struct AlsOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  std::uint64_t seed = 0;
  int restarts = 20;
  // Stop a restart when the relative residual change falls below this.
  double stall_tol = 1e-12;
};

/// Symmetric rank-R fit of 3*I4 by alternating least squares. Every sweep
/// updates the four mode factors, then sign-aligns and averages them back
/// into a single symmetric factor. Restarts are independent and reduced by
/// lowest residual, ties to the lowest restart index. Throws NoConvergence
/// with the best residual when no restart reaches opts.tol.
CpdFactors cpd_als(Index n, Index rank, const AlsOptions& opts);

/// Searches rank upward from n(n+1)/2 until cpd_als succeeds or max_rank is
/// exceeded (0 means the dimension of symmetric order-4 tensors).
CpdFactors cpd_rank_search(Index n, const AlsOptions& opts, Index max_rank = 0);

/// Frobenius norm of sum_r beta_r^2 v_r^{(x)4} - 3*I4, in binary64.
double verify_cpd(const CpdFactors& f);

/// Dense reconstruction sum_r beta_r^2 v_r^{(x)4}.
Tensor4<double> reconstruct(const CpdFactors& f);

/// Factor file (JSON). Numbers are written as decimal strings with 17
/// significant digits, so a save/load round trip is bit-exact.
std::string factors_to_json(const CpdFactors& f);
CpdFactors factors_from_json(const std::string& text);

void save_factors(const CpdFactors& f, const std::filesystem::path& path);
/// Throws MalformedFile on unreadable/truncated content and FailedInvariant
/// when the decoded factors violate CpdFactors::validate().
CpdFactors load_factors(const std::filesystem::path& path);

/// Hex SHA-256 of a byte string; used for report provenance.
std::string sha256_hex(const std::string& bytes);

}  // namespace momentmap
