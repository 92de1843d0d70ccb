#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "momentmap/experiment.hpp"

using namespace momentmap;

TEST(ExperimentNames, RoundTrip) {
  for (auto m : {Method::sqrt, Method::full}) EXPECT_EQ(parse_method(to_string(m)), m);
  for (auto k : {ExperimentKind::polar, ExperimentKind::vanderpol}) EXPECT_EQ(parse_experiment(to_string(k)), k);
  for (auto d : {DerivativePrecision::binary64, DerivativePrecision::cell})
    EXPECT_EQ(parse_derivative_precision(to_string(d)), d);
  EXPECT_FALSE(parse_method("dense").has_value());
  EXPECT_FALSE(parse_experiment("lorenz").has_value());
}

TEST(Experiment, SingleCellHasNoDifferences) {
  auto spec = ExperimentSpec::defaults(ExperimentKind::polar);
  spec.methods = {Method::sqrt};
  spec.precisions = {Precision::binary64};
  const auto report = run_experiment(spec);
  ASSERT_EQ(report.cells.size(), 1u);
  EXPECT_EQ(report.cells[0].label(), "S64");
  EXPECT_TRUE(report.cells[0].ok);
  EXPECT_TRUE(report.differences.empty());
  EXPECT_FALSE(report.ordering_holds().has_value());
}

TEST(Experiment, PolarProducesFourRowsInReportOrder) {
  const auto report = run_experiment(ExperimentSpec::defaults(ExperimentKind::polar));
  ASSERT_EQ(report.cells.size(), 4u);
  EXPECT_TRUE(report.all_cells_ok());
  ASSERT_EQ(report.differences.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& [lhs, rhs] = difference_rows()[i];
    EXPECT_EQ(report.differences[i].label, std::string(lhs) + " vs " + std::string(rhs));
  }
  const auto* s64 = report.find_cell(Method::sqrt, Precision::binary64);
  ASSERT_NE(s64, nullptr);
  const auto* d = report.find_difference("S64 vs S32");
  ASSERT_NE(d, nullptr);
  EXPECT_NEAR(d->relative, d->frobenius / s64->chol.norm(), 1e-15 * d->relative);
  EXPECT_EQ(report.find_difference("S64 vs S64"), nullptr);
  EXPECT_EQ(report.ordering_holds(), std::optional<bool>(true));
}

TEST(Experiment, CellsAreLowerTriangularWithNonnegativeDiagonal) {
  for (auto kind : {ExperimentKind::polar, ExperimentKind::vanderpol}) {
    const auto report = run_experiment(ExperimentSpec::defaults(kind));
    for (const auto& cell : report.cells) {
      ASSERT_TRUE(cell.ok) << cell.label() << ": " << cell.error;
      for (Index i = 0; i < cell.chol.rows(); ++i) {
        EXPECT_GE(cell.chol(i, i), 0.0);
        for (Index j = i + 1; j < cell.chol.cols(); ++j) EXPECT_EQ(cell.chol(i, j), 0.0);
      }
    }
  }
}

TEST(Experiment, ReportsAreDeterministic) {
  for (auto kind : {ExperimentKind::polar, ExperimentKind::vanderpol}) {
    const auto spec = ExperimentSpec::defaults(kind);
    EXPECT_EQ(report_to_json(run_experiment(spec)), report_to_json(run_experiment(spec)));
    EXPECT_EQ(report_to_csv(run_experiment(spec)), report_to_csv(run_experiment(spec)));
  }
}

TEST(Experiment, JsonCarriesConfigDifferencesAndProvenance) {
  const auto report = run_experiment(ExperimentSpec::defaults(ExperimentKind::vanderpol));
  const auto j = nlohmann::json::parse(report_to_json(report));
  EXPECT_EQ(j.at("experiment"), "vanderpol");
  EXPECT_TRUE(j.contains("config"));
  ASSERT_EQ(j.at("differences").size(), 4u);
  EXPECT_EQ(j.at("differences")[0].at("label"), "S64 vs P64");
  EXPECT_TRUE(j.at("differences")[0].contains("frobenius"));

  const auto& prov = j.at("provenance");
  EXPECT_EQ(prov.at("cpd_source"), "analytic");
  EXPECT_EQ(prov.at("cpd_sha256"), sha256_hex(factors_to_json(cpd_analytic(2))));
  EXPECT_EQ(prov.at("cpd_rank"), 3);
  EXPECT_EQ(prov.at("integrator"), "rk4");
  EXPECT_EQ(prov.at("integrator_steps"), 1000);
  EXPECT_EQ(prov.at("derivative_precision"), "binary64");
  EXPECT_TRUE(prov.at("build").is_string());
  EXPECT_EQ(prov.at("precisions").size(), 2u);

  const auto polar = nlohmann::json::parse(report_to_json(run_experiment(ExperimentSpec::defaults(ExperimentKind::polar))));
  EXPECT_EQ(polar.at("provenance").at("integrator"), "none");
}

TEST(Experiment, CsvHasHeaderAndOneRowPerDifference) {
  const auto csv = report_to_csv(run_experiment(ExperimentSpec::defaults(ExperimentKind::polar)));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "experiment,label,value");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("polar,", 0), 0u) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(Experiment, RejectsCpdOfWrongDimension) {
  EXPECT_THROW(run_experiment(ExperimentSpec::defaults(ExperimentKind::polar), cpd_analytic(3)), Error);
}

TEST(Experiment, AlternativeCpdGivesSameBinary64Result) {
  AlsOptions opts;
  opts.tol = 1e-12;
  const auto spec = ExperimentSpec::defaults(ExperimentKind::polar);
  const auto a = run_experiment(spec);
  const auto b = run_experiment(spec, cpd_als(2, 3, opts), "als");
  const auto* ca = a.find_cell(Method::sqrt, Precision::binary64);
  const auto* cb = b.find_cell(Method::sqrt, Precision::binary64);
  const Matrix<double> pa = ca->chol * ca->chol.transpose();
  const Matrix<double> pb = cb->chol * cb->chol.transpose();
  EXPECT_LE((pa - pb).norm() / pa.norm(), 1e-10);
  EXPECT_EQ(b.provenance.cpd_source, "als");
}

TEST(Experiment, CellPrecisionDerivativesAreRecorded) {
  auto spec = ExperimentSpec::defaults(ExperimentKind::vanderpol);
  spec.vanderpol.derivatives = DerivativePrecision::cell;
  const auto report = run_experiment(spec);
  EXPECT_TRUE(report.all_cells_ok());
  EXPECT_EQ(report.provenance.derivative_precision, "cell");
}
