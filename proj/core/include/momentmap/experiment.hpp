#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "momentmap/cpd.hpp"
#include "momentmap/linalg.hpp"
#include "momentmap/models.hpp"
#include "momentmap/precision.hpp"

namespace momentmap {

enum class Method { sqrt, full };
enum class ExperimentKind { polar, vanderpol };

// Where the Van der Pol flow derivatives (Phi, Psi) are generated.
//   binary64: integrate once in double, round G1/G2 to the cell precision.
//   cell:     integrate the variational equations in the cell precision.
enum class DerivativePrecision { binary64, cell };

std::string_view to_string(Method m);
std::string_view to_string(ExperimentKind k);
std::string_view to_string(DerivativePrecision d);
std::optional<Method> parse_method(std::string_view s);
std::optional<ExperimentKind> parse_experiment(std::string_view s);
std::optional<DerivativePrecision> parse_derivative_precision(std::string_view s);

struct PolarParams {
  std::array<double, 2> mean{0.0, 1000.0};
  // S_x = 250 * diag(4, 1)
  std::array<double, 2> sqrt_diag{1000.0, 250.0};
};

struct VanderpolParams {
  std::array<double, 2> mean{0.1, 0.5};
  double alpha = 1.0471975511965976;  // pi / 3
  double beta = 5e-6;
  double sigma = 0.1;
  double zeta = 1e-3;
  VdpConfig flow{};
  DerivativePrecision derivatives = DerivativePrecision::binary64;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::polar;
  std::vector<Precision> precisions{Precision::binary64, Precision::binary32};
  std::vector<Method> methods{Method::sqrt, Method::full};
  PolarParams polar{};
  VanderpolParams vanderpol{};

  static ExperimentSpec defaults(ExperimentKind kind);
};

/// One (method, precision) evaluation, widened to binary64.
struct CellResult {
  Method method = Method::sqrt;
  Precision precision = Precision::binary64;
  bool ok = false;
  std::string error;
  Vector<double> mean;
  Matrix<double> chol;

  // "S64", "P32", ...
  std::string label() const;
};

struct Difference {
  std::string label;  // "S64 vs P32"
  double frobenius = 0.0;
  double relative = 0.0;  // frobenius / |lhs|_F
};

struct Provenance {
  std::string cpd_source;
  std::string cpd_sha256;
  Index cpd_rank = 0;
  double integrator_step = 0.0;
  long integrator_steps = 0;
  std::string derivative_precision;
  std::vector<std::string> precisions;
  std::string build;
};

struct PrecisionReport {
  std::string experiment;
  ExperimentSpec spec;
  std::vector<CellResult> cells;
  std::vector<Difference> differences;
  Provenance provenance;

  const CellResult* find_cell(Method m, Precision p) const;
  const Difference* find_difference(std::string_view label) const;

  // |S32 - S64| < |P32 - S64|; empty when a needed cell is missing or failed.
  std::optional<bool> ordering_holds() const;
  bool all_cells_ok() const;
};

/// The four comparison rows, in report order.
const std::array<std::pair<std::string_view, std::string_view>, 4>& difference_rows();

/// Runs every (method, precision) cell of the spec. Inputs are built in
/// binary64 and rounded once on entry to each cell; everything downstream
/// runs in the cell precision. Full-covariance results are converted to
/// Cholesky factors before differencing. Cell failures are recorded, not
/// thrown.
PrecisionReport run_experiment(const ExperimentSpec& spec, const CpdFactors& cpd,
                               const std::string& cpd_source = "analytic");
PrecisionReport run_experiment(const ExperimentSpec& spec);

std::string report_to_json(const PrecisionReport& report);
std::string report_to_csv(const PrecisionReport& report);

}  // namespace momentmap
