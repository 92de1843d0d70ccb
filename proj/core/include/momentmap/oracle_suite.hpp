#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "momentmap/cpd.hpp"
#include "momentmap/linalg.hpp"

namespace momentmap {

struct OracleSuiteOptions {
  int cases = 200;
  std::uint64_t seed = 0;
  Index max_in_dim = 4;
  Index max_out_dim = 4;
  double max_condition = 1e6;
  double cov_tol = 1e-10;   // |S S^T - P|_F / |P|_F
  double chol_tol = 1e-9;   // |S - chol(P)|_F / |S|_F
};

struct OracleCase {
  int index = 0;
  Index in_dim = 0;
  Index out_dim = 0;
  double condition = 0.0;       // of the input root
  bool triangular_root = false;
  double cov_rel = 0.0;
  double chol_rel = 0.0;
  bool sqrt_factor_ok = false;  // lower triangular with nonnegative diagonal
  bool passed = false;
  std::string error;
};

struct OracleSuiteResult {
  std::vector<OracleCase> cases;
  double worst_cov_rel = 0.0;
  double worst_chol_rel = 0.0;
  int failures = 0;

  bool passed() const noexcept { return failures == 0 && !cases.empty(); }
};

/// CPD of 3*I4 used by the battery for dimension n: closed form for n <= 3,
/// otherwise the result of a seeded rank search, cached per process.
const CpdFactors& standard_cpd(Index n);

/// Randomized sqrt-vs-full equivalence battery in binary64. Each case draws
/// n, m, an input root with a prescribed condition number (alternately
/// general and lower triangular), a random quadratic model and additive
/// noise, then compares map_second_order_sqrt against map_second_order_full.
OracleSuiteResult run_oracle_suite(const OracleSuiteOptions& opts);

}  // namespace momentmap
