#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"
#include "momentmap/experiment.hpp"

namespace momentmap {

namespace {

using nlohmann::ordered_json;

// %.17g round-trips binary64; printed as a number so the JSON stays numeric.
std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json matrix_json(const Matrix<double>& m) {
  ordered_json rows = ordered_json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_json(const Vector<double>& v) {
  ordered_json out = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json config_json(const ExperimentSpec& spec) {
  ordered_json cfg;
  ordered_json precisions = ordered_json::array();
  for (Precision p : spec.precisions) precisions.push_back(std::string(to_string(p)));
  ordered_json methods = ordered_json::array();
  for (Method m : spec.methods) methods.push_back(std::string(to_string(m)));
  cfg["precisions"] = precisions;
  cfg["methods"] = methods;
  if (spec.kind == ExperimentKind::polar) {
    cfg["mean"] = spec.polar.mean;
    cfg["sqrt_diag"] = spec.polar.sqrt_diag;
  } else {
    const auto& p = spec.vanderpol;
    cfg["mean"] = p.mean;
    cfg["alpha"] = p.alpha;
    cfg["beta"] = p.beta;
    cfg["sigma"] = p.sigma;
    cfg["zeta"] = p.zeta;
    cfg["mu"] = p.flow.mu;
    cfg["t0"] = p.flow.t0;
    cfg["tf"] = p.flow.tf;
    cfg["step"] = p.flow.step;
    cfg["derivatives"] = std::string(to_string(p.derivatives));
  }
  return cfg;
}

}  // namespace

std::string report_to_json(const PrecisionReport& report) {
  ordered_json doc;
  doc["experiment"] = report.experiment;
  doc["config"] = config_json(report.spec);

  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    ordered_json cell;
    cell["label"] = c.label();
    cell["ok"] = c.ok;
    if (c.ok) {
      cell["mean"] = vector_json(c.mean);
      cell["chol"] = matrix_json(c.chol);
    } else {
      cell["error"] = c.error;
    }
    cells.push_back(std::move(cell));
  }
  doc["cells"] = std::move(cells);

  ordered_json diffs = ordered_json::array();
  for (const auto& d : report.differences) {
    ordered_json row;
    row["label"] = d.label;
    row["frobenius"] = d.frobenius;
    row["relative"] = d.relative;
    diffs.push_back(std::move(row));
  }
  doc["differences"] = std::move(diffs);

  const std::optional<bool> ordering = report.ordering_holds();
  doc["checks"]["ordering"] = ordering ? ordered_json(*ordering) : ordered_json(nullptr);
  doc["checks"]["all_cells_ok"] = report.all_cells_ok();

  const Provenance& p = report.provenance;
  ordered_json prov;
  prov["cpd_source"] = p.cpd_source;
  prov["cpd_sha256"] = p.cpd_sha256;
  prov["cpd_rank"] = p.cpd_rank;
  prov["integrator"] = report.spec.kind == ExperimentKind::vanderpol ? "rk4" : "none";
  prov["integrator_step"] = p.integrator_step;
  prov["integrator_steps"] = p.integrator_steps;
  prov["derivative_precision"] = p.derivative_precision;
  prov["precisions"] = p.precisions;
  prov["build"] = p.build;
  doc["provenance"] = std::move(prov);

  return doc.dump(2) + "\n";
}

std::string report_to_csv(const PrecisionReport& report) {
  std::ostringstream out;
  out << "experiment,label,value\n";
  for (const auto& d : report.differences) {
    out << report.experiment << ',' << d.label << ',' << format_double(d.frobenius) << '\n';
  }
  return out.str();
}

}  // namespace momentmap
