#include "momentmap/cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "momentmap/cpd.hpp"
#include "momentmap/errors.hpp"
#include "momentmap/experiment.hpp"
#include "momentmap/oracle_suite.hpp"

namespace momentmap {

namespace {

std::string fmt(const char* spec, double v) {
  if (v == 0.0) v = 0.0;  // print -0 as 0
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "cannot open " << path << " for writing\n";
    return false;
  }
  f << text;
  if (!f) {
    err << "failed writing " << path << "\n";
    return false;
  }
  return true;
}

void print_factors(const CpdFactors& f, std::ostream& out) {
  out << "dim " << f.dim << "  rank " << f.rank << "  generator " << f.generator
      << "  residual " << fmt("%.3e", f.residual) << "\n";
  out << "r  beta               v\n";
  for (Index r = 0; r < f.rank; ++r) {
    out << r + 1 << "  " << fmt("%.15g", f.betas[std::size_t(r)]);
    for (Index i = 0; i < f.dim; ++i) out << "  " << fmt("%.15g", f.vectors(i, r));
    out << "\n";
  }
}

struct CpdArgs {
  int dim = 0;
  int rank = 0;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int max_iter = 5000;
  int restarts = 20;
  std::string out;
};

int run_cpd(const CpdArgs& a, std::ostream& out, std::ostream& err) {
  AlsOptions opts;
  opts.tol = a.tol;
  opts.seed = a.seed;
  opts.max_iter = a.max_iter;
  opts.restarts = a.restarts;

  CpdFactors f;
  try {
    if (a.rank > 0) {
      f = cpd_als(a.dim, a.rank, opts);
    } else if (a.dim <= 3) {
      f = cpd_analytic(a.dim);
    } else {
      f = cpd_rank_search(a.dim, opts);
    }
  } catch (const NoConvergence& e) {
    err << "cpd: " << e.what() << "\n";
    err << "best residual " << fmt("%.6e", e.best_residual()) << "\n";
    if (e.symmetrization_failed()) {
      err << "an asymmetric ALS solution reached the tolerance but did not symmetrize\n";
    }
    return exit_failed_check;
  }

  print_factors(f, out);
  if (!a.out.empty()) {
    save_factors(f, a.out);
    out << "wrote " << a.out << "\n";
  }
  return exit_ok;
}

int run_verify(const std::string& path, double tol, std::ostream& out, std::ostream& err) {
  const CpdFactors f = load_factors(path);
  const double residual = verify_cpd(f);
  out << "dim " << f.dim << "  rank " << f.rank << "  residual " << fmt("%.3e", residual) << "\n";
  if (!(residual <= tol)) {
    err << "verify-cpd: residual " << fmt("%.3e", residual) << " exceeds " << fmt("%.1e", tol)
        << "\n";
    return exit_failed_check;
  }
  return exit_ok;
}

struct ExperimentArgs {
  std::string kind;
  std::string report;
  std::string format = "json";
  std::string cpd;
  std::string derivatives = "binary64";
  std::vector<std::string> methods;
  std::vector<std::string> precisions;
};

int run_experiment_cmd(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec = ExperimentSpec::defaults(*parse_experiment(a.kind));
  spec.vanderpol.derivatives = *parse_derivative_precision(a.derivatives);
  if (!a.methods.empty()) {
    spec.methods.clear();
    for (const auto& m : a.methods) spec.methods.push_back(*parse_method(m));
  }
  if (!a.precisions.empty()) {
    spec.precisions.clear();
    for (const auto& p : a.precisions) spec.precisions.push_back(*parse_precision(p));
  }

  PrecisionReport report;
  if (a.cpd.empty()) {
    report = run_experiment(spec);
  } else {
    std::ifstream f(a.cpd, std::ios::binary);
    if (!f) throw MalformedFile("cannot open factor file " + a.cpd);
    std::ostringstream bytes;
    bytes << f.rdbuf();
    report = run_experiment(spec, factors_from_json(bytes.str()), a.cpd);
    report.provenance.cpd_sha256 = sha256_hex(bytes.str());
  }

  const std::string text = a.format == "csv" ? report_to_csv(report) : report_to_json(report);
  if (a.report.empty()) {
    out << text;
  } else {
    if (!write_file(a.report, text, err)) return exit_failed_check;
    for (const auto& d : report.differences) {
      out << d.label << "  " << fmt("%.6e", d.frobenius) << "\n";
    }
    out << "wrote " << a.report << "\n";
  }

  int code = exit_ok;
  for (const auto& c : report.cells) {
    if (!c.ok) {
      err << "cell " << c.label() << " failed: " << c.error << "\n";
      code = exit_failed_check;
    }
  }
  if (report.ordering_holds() == false) {
    err << "ordering check failed: |S32 - S64| is not below |P32 - S64|\n";
    code = exit_failed_check;
  }
  return code;
}

int run_oracle(int cases, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  OracleSuiteOptions opts;
  opts.cases = cases;
  opts.seed = seed;
  const OracleSuiteResult r = run_oracle_suite(opts);
  for (const auto& c : r.cases) {
    if (c.passed) continue;
    err << "case " << c.index << " (n=" << c.in_dim << ", m=" << c.out_dim
        << ", cond=" << fmt("%.2e", c.condition) << "): ";
    if (!c.error.empty()) {
      err << c.error << "\n";
    } else {
      err << "cov_rel " << fmt("%.3e", c.cov_rel) << ", chol_rel " << fmt("%.3e", c.chol_rel)
          << (c.sqrt_factor_ok ? "" : ", factor not canonical") << "\n";
    }
  }
  out << "cases " << r.cases.size() << "  failures " << r.failures << "  worst cov_rel "
      << fmt("%.3e", r.worst_cov_rel) << "  worst chol_rel " << fmt("%.3e", r.worst_chol_rel)
      << "\n";
  return r.passed() ? exit_ok : exit_failed_check;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Square-root second-order moment mapping: CPD factors, experiments, oracle checks",
               "momentmap"};
  app.require_subcommand(1);

  CpdArgs cpd_args;
  CLI::App* cpd = app.add_subcommand("cpd", "Generate CPD factors of 3*I4");
  cpd->add_option("--dim", cpd_args.dim, "Dimension n")->required()->check(CLI::PositiveNumber);
  cpd->add_option("--rank", cpd_args.rank, "Rank R (forces ALS)")->check(CLI::PositiveNumber);
  cpd->add_option("--tol", cpd_args.tol, "ALS residual tolerance")->capture_default_str();
  cpd->add_option("--seed", cpd_args.seed, "ALS seed")->capture_default_str();
  cpd->add_option("--max-iter", cpd_args.max_iter, "ALS sweeps per restart")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cpd->add_option("--restarts", cpd_args.restarts, "ALS restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cpd->add_option("--out", cpd_args.out, "Write the factors to this JSON file");

  std::string verify_path;
  double verify_tol = 1e-14;
  CLI::App* verify = app.add_subcommand("verify-cpd", "Check a factor file against 3*I4");
  verify->add_option("file", verify_path, "Factor file")->required();
  verify->add_option("--tol", verify_tol, "Residual tolerance")->capture_default_str();

  ExperimentArgs exp_args;
  CLI::App* exp = app.add_subcommand("experiment", "Run a mixed-precision experiment");
  exp->add_option("name", exp_args.kind, "polar or vanderpol")
      ->required()
      ->check(CLI::IsMember({"polar", "vanderpol"}));
  exp->add_option("--report", exp_args.report, "Write the report to this file");
  exp->add_option("--format", exp_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  exp->add_option("--cpd", exp_args.cpd, "Factor file for n = 2 (default: closed form)");
  exp->add_option("--derivatives", exp_args.derivatives,
                  "Van der Pol flow derivatives: binary64 (rounded per cell) or cell")
      ->check(CLI::IsMember({"binary64", "cell"}))
      ->capture_default_str();
  exp->add_option("--methods", exp_args.methods, "Subset of sqrt, full")
      ->check(CLI::IsMember({"sqrt", "full"}));
  exp->add_option("--precisions", exp_args.precisions, "Subset of binary32, binary64")
      ->check(CLI::IsMember({"binary32", "binary64"}));

  int oracle_cases = 200;
  std::uint64_t oracle_seed = 0;
  CLI::App* oracle =
      app.add_subcommand("oracle-suite", "Randomized square-root vs full-covariance battery");
  oracle->add_option("--cases", oracle_cases, "Number of random instances")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  oracle->add_option("--seed", oracle_seed, "Seed")->capture_default_str();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("momentmap");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return exit_usage;
  }

  try {
    if (cpd->parsed()) return run_cpd(cpd_args, out, err);
    if (verify->parsed()) return run_verify(verify_path, verify_tol, out, err);
    if (exp->parsed()) return run_experiment_cmd(exp_args, out, err);
    if (oracle->parsed()) return run_oracle(oracle_cases, oracle_seed, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failed_check;
  }
  err << app.help();
  return exit_usage;
}

}  // namespace momentmap
