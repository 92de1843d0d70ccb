#include "momentmap/experiment.hpp"

#include <string>
#include <utility>

#include "momentmap/moment_maps.hpp"

namespace momentmap {

namespace {

template <Real T>
Vector<T> to_vector(const std::array<double, 2>& a) {
  Vector<T> v(2);
  v << static_cast<T>(a[0]), static_cast<T>(a[1]);
  return v;
}

template <Real T>
LowerTriangular<T> polar_cell(Method method, const PolarParams& params, const CpdFactors& cpd) {
  const Vector<T> mean = to_vector<T>(params.mean);
  Matrix<double> root64 = Matrix<double>::Zero(2, 2);
  root64(0, 0) = params.sqrt_diag[0];
  root64(1, 1) = params.sqrt_diag[1];
  const Matrix<T> root = root64.cast<T>();

  const SecondOrderModel<T> model = polar_model_at<T>(mean);
  if (method == Method::sqrt) {
    return map_second_order_sqrt<T>({mean, root}, model, NoiseSqrt<T>::none(2), cpd).chol;
  }
  const Matrix<T> cov = root * root.transpose();
  const FullGaussian<T> out = map_second_order_full<T>({mean, cov}, model, NoiseCov<T>::none(2));
  return cholesky<T>(out.cov);
}

template <Real T>
LowerTriangular<T> vanderpol_cell(Method method, const VanderpolParams& params,
                                  const CpdFactors& cpd) {
  const Vector<T> mean = to_vector<T>(params.mean);
  const Matrix<T> root = vdp_input_sqrt(params.alpha, params.beta, params.sigma).cast<T>();
  const Matrix<T> root_w =
      (params.zeta * params.sigma * Matrix<double>::Identity(2, 2)).cast<T>();
  const Matrix<T> gamma = Matrix<T>::Identity(2, 2);

  const SecondOrderModel<T> model =
      params.derivatives == DerivativePrecision::cell
          ? vdp_model_at<T>(mean, params.flow)
          : vdp_model_at<double>(to_vector<double>(params.mean), params.flow).template cast<T>();

  if (method == Method::sqrt) {
    return map_second_order_sqrt<T>({mean, root}, model, NoiseSqrt<T>{gamma, root_w}, cpd).chol;
  }
  const Matrix<T> cov = root * root.transpose();
  const Matrix<T> cov_w = root_w * root_w.transpose();
  const FullGaussian<T> out =
      map_second_order_full<T>({mean, cov}, model, NoiseCov<T>{gamma, cov_w});
  return cholesky<T>(out.cov);
}

template <Real T>
CellResult run_cell(const ExperimentSpec& spec, Method method, const CpdFactors& cpd) {
  CellResult cell;
  cell.method = method;
  cell.precision = precision_of<T>;
  try {
    const LowerTriangular<T> chol = spec.kind == ExperimentKind::polar
                                        ? polar_cell<T>(method, spec.polar, cpd)
                                        : vanderpol_cell<T>(method, spec.vanderpol, cpd);
    cell.chol = chol.matrix().template cast<double>();
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

// The mean does not depend on the covariance route; record it per precision
// from the same building blocks the cells use.
template <Real T>
Vector<double> cell_mean(const ExperimentSpec& spec, const CpdFactors& cpd) {
  if (spec.kind == ExperimentKind::polar) {
    const Vector<T> mean = to_vector<T>(spec.polar.mean);
    Matrix<double> root64 = Matrix<double>::Zero(2, 2);
    root64(0, 0) = spec.polar.sqrt_diag[0];
    root64(1, 1) = spec.polar.sqrt_diag[1];
    const SecondOrderModel<T> model = polar_model_at<T>(mean);
    const Vector<T> dm = second_order_mean_correction<T>(root64.cast<T>(), model.hessian());
    (void)cpd;
    return (model.value() + dm).template cast<double>();
  }
  const auto& p = spec.vanderpol;
  const Vector<T> mean = to_vector<T>(p.mean);
  const SecondOrderModel<T> model =
      p.derivatives == DerivativePrecision::cell
          ? vdp_model_at<T>(mean, p.flow)
          : vdp_model_at<double>(to_vector<double>(p.mean), p.flow).template cast<T>();
  const Matrix<T> root = vdp_input_sqrt(p.alpha, p.beta, p.sigma).cast<T>();
  const Vector<T> dm = second_order_mean_correction<T>(root, model.hessian());
  return (model.value() + dm).template cast<double>();
}

std::string build_notes() {
  std::string notes = "compiler=";
#if defined(__clang__)
  notes += "clang " __clang_version__;
#elif defined(__GNUC__)
  notes += "gcc " __VERSION__;
#else
  notes += "unknown";
#endif
  notes += "; fp-contract=off; eigen=" + std::to_string(EIGEN_WORLD_VERSION) + "." +
           std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
  return notes;
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::sqrt ? "sqrt" : "full"; }

std::string_view to_string(ExperimentKind k) {
  return k == ExperimentKind::polar ? "polar" : "vanderpol";
}

std::string_view to_string(DerivativePrecision d) {
  return d == DerivativePrecision::cell ? "cell" : "binary64";
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "sqrt" || s == "S") return Method::sqrt;
  if (s == "full" || s == "P") return Method::full;
  return std::nullopt;
}

std::optional<ExperimentKind> parse_experiment(std::string_view s) {
  if (s == "polar") return ExperimentKind::polar;
  if (s == "vanderpol" || s == "vdp") return ExperimentKind::vanderpol;
  return std::nullopt;
}

std::optional<DerivativePrecision> parse_derivative_precision(std::string_view s) {
  if (s == "cell") return DerivativePrecision::cell;
  if (s == "binary64" || s == "64") return DerivativePrecision::binary64;
  return std::nullopt;
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  return spec;
}

std::string CellResult::label() const {
  return std::string(method == Method::sqrt ? "S" : "P") + std::string(bits_tag(precision));
}

const CellResult* PrecisionReport::find_cell(Method m, Precision p) const {
  for (const auto& c : cells) {
    if (c.method == m && c.precision == p) return &c;
  }
  return nullptr;
}

const Difference* PrecisionReport::find_difference(std::string_view label) const {
  for (const auto& d : differences) {
    if (d.label == label) return &d;
  }
  return nullptr;
}

std::optional<bool> PrecisionReport::ordering_holds() const {
  const Difference* sqrt_err = find_difference("S64 vs S32");
  const Difference* full_err = find_difference("S64 vs P32");
  if (sqrt_err == nullptr || full_err == nullptr) return std::nullopt;
  return sqrt_err->frobenius < full_err->frobenius;
}

bool PrecisionReport::all_cells_ok() const {
  for (const auto& c : cells) {
    if (!c.ok) return false;
  }
  return true;
}

const std::array<std::pair<std::string_view, std::string_view>, 4>& difference_rows() {
  static const std::array<std::pair<std::string_view, std::string_view>, 4> rows{{
      {"S64", "P64"},
      {"S32", "P32"},
      {"S64", "S32"},
      {"S64", "P32"},
  }};
  return rows;
}

PrecisionReport run_experiment(const ExperimentSpec& spec, const CpdFactors& cpd,
                               const std::string& cpd_source) {
  cpd.validate();
  if (cpd.dim != 2) {
    throw DimensionMismatch("run_experiment: both experiments need a CPD for n = 2, got n = " +
                            std::to_string(cpd.dim));
  }
  if (spec.kind == ExperimentKind::vanderpol) spec.vanderpol.flow.validate();

  PrecisionReport report;
  report.experiment = std::string(to_string(spec.kind));
  report.spec = spec;

  // Fixed cell order: methods outer, precisions inner, as listed in the spec.
  for (Method method : spec.methods) {
    for (Precision p : spec.precisions) {
      CellResult cell = dispatch(p, [&](auto tag) {
        using T = decltype(tag);
        return run_cell<T>(spec, method, cpd);
      });
      if (cell.ok) {
        cell.mean = dispatch(p, [&](auto tag) {
          using T = decltype(tag);
          return cell_mean<T>(spec, cpd);
        });
      }
      report.cells.push_back(std::move(cell));
    }
  }

  auto by_label = [&](std::string_view label) -> const CellResult* {
    for (const auto& c : report.cells) {
      if (c.label() == label) return &c;
    }
    return nullptr;
  };
  for (const auto& [lhs, rhs] : difference_rows()) {
    const CellResult* a = by_label(lhs);
    const CellResult* b = by_label(rhs);
    if (a == nullptr || b == nullptr || !a->ok || !b->ok) continue;
    Difference d;
    d.label = std::string(lhs) + " vs " + std::string(rhs);
    d.frobenius = (a->chol - b->chol).norm();
    const double scale = a->chol.norm();
    d.relative = scale > 0.0 ? d.frobenius / scale : d.frobenius;
    report.differences.push_back(std::move(d));
  }

  Provenance& prov = report.provenance;
  prov.cpd_source = cpd_source;
  prov.cpd_sha256 = sha256_hex(factors_to_json(cpd));
  prov.cpd_rank = cpd.rank;
  if (spec.kind == ExperimentKind::vanderpol) {
    prov.integrator_steps = spec.vanderpol.flow.steps();
    prov.integrator_step = prov.integrator_steps > 0
                               ? (spec.vanderpol.flow.tf - spec.vanderpol.flow.t0) /
                                     double(prov.integrator_steps)
                               : 0.0;
    prov.derivative_precision = std::string(to_string(spec.vanderpol.derivatives));
  } else {
    prov.derivative_precision = "analytic";
  }
  for (Precision p : spec.precisions) prov.precisions.emplace_back(to_string(p));
  prov.build = build_notes();
  return report;
}

PrecisionReport run_experiment(const ExperimentSpec& spec) {
  return run_experiment(spec, cpd_analytic(2), "analytic");
}

}  // namespace momentmap
