// Command-line front end: goodness-of-fit runs, simulation studies, and
// FPCA reports.  Exit codes: 0 ok, 2 config error, 3 data error,
// 4 degenerate statistic.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "fgof/gof.hpp"
#include "fgof/io.hpp"
#include "fgof/models.hpp"
#include "fgof/simulate.hpp"
#include "fgof/version.hpp"

namespace {

struct ConfigFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> model, basis, kernel, variance, calibration, h;
  std::optional<int> p, m, grid_size, refine_fanout, B, threads;
  std::optional<double> alpha_n, level, h_v;
  std::optional<std::uint64_t> seed;
  bool freeze_direction = false;
  bool freeze_model = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_file,
                  "key = value config file; explicit flags override it");
  cmd->add_option("--model", f.model, "none, linear or quadratic");
  cmd->add_option("--p", f.p, "projection dimension");
  cmd->add_option("--basis", f.basis, "projection basis: kl_sine or fpca");
  cmd->add_option("--m", f.m, "model truncation");
  cmd->add_option("--h", f.h, "bandwidth or comma-separated grid");
  cmd->add_option("--kernel", f.kernel, "epanechnikov or gaussian");
  cmd->add_option("--alpha-n", f.alpha_n, "selection penalty");
  cmd->add_option("--variance", f.variance, "variance estimator: min or cond");
  cmd->add_option("--calibration", f.calibration, "bootstrap or normal");
  cmd->add_option("--B", f.B, "bootstrap replicates");
  cmd->add_option("--level", f.level, "test level");
  cmd->add_option("--seed", f.seed, "master RNG seed");
  cmd->add_option("--grid-size", f.grid_size, "direction grid size (0 = default)");
  cmd->add_option("--refine-fanout", f.refine_fanout,
                  "local refinement points (0 = default)");
  cmd->add_option("--h-v", f.h_v,
                  "conditional-variance bandwidth (0 = 0.5 n^-1/6)");
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
  cmd->add_flag("--freeze-direction", f.freeze_direction,
                "reuse the selected direction inside bootstrap replicates");
  cmd->add_flag("--freeze-model", f.freeze_model,
                "skip refitting inside bootstrap replicates");
}

fgof::TestConfig build_config(const ConfigFlags& f) {
  fgof::TestConfig c;
  if (f.config_file) c = fgof::load_config_file(*f.config_file);
  if (f.model) c.model = fgof::model_from_name(*f.model);
  if (f.p) c.p = *f.p;
  if (f.basis) c.basis = fgof::basis_from_name(*f.basis);
  if (f.m) c.m = *f.m;
  if (f.h) c.bandwidths = fgof::parse_bandwidths(*f.h);
  if (f.kernel) c.kernel = fgof::kernel_from_name(*f.kernel);
  if (f.alpha_n) c.alpha_n = *f.alpha_n;
  if (f.variance) c.variance = fgof::variance_from_name(*f.variance);
  if (f.calibration) c.calibration = fgof::calibration_from_name(*f.calibration);
  if (f.B) c.bootstrap_replicates = *f.B;
  if (f.level) c.level = *f.level;
  if (f.seed) c.seed = *f.seed;
  if (f.grid_size) c.grid_size = *f.grid_size;
  if (f.refine_fanout) c.refine_fanout = *f.refine_fanout;
  if (f.h_v) c.h_v = *f.h_v;
  if (f.threads) c.threads = *f.threads;
  if (f.freeze_direction) c.freeze_direction = true;
  if (f.freeze_model) c.freeze_model = true;
  return c;
}

void print_summary(const fgof::TestResult& result) {
  const auto& c = result.config;
  std::cout << "n = " << result.n << ", model = " << fgof::model_name(c.model)
            << ", p = " << c.p << ", m = " << c.m
            << ", directions = " << result.direction_count << "\n";
  for (size_t k = 0; k < result.by_bandwidth.size(); ++k) {
    const auto& br = result.by_bandwidth[k];
    double p = br.p_value(c.calibration);
    std::cout << "h = " << br.h << ": T_n = " << br.t_stat
              << ", gamma_hat = " << (br.at_gamma0 ? "gamma0" : "selected")
              << ", p = " << p << " (" << 100.0 * p << "%)"
              << ", reject@" << c.level << " = "
              << (result.reject(static_cast<int>(k)) ? "yes" : "no") << "\n";
  }
}

int run_gof_cmd(const ConfigFlags& flags, const std::string& curves_path,
                const std::string& response_path,
                const std::optional<std::string>& grid_path,
                const std::optional<std::string>& out_path,
                const std::optional<std::string>& directions_path) {
  fgof::TestConfig config = build_config(flags);
  auto curves = fgof::ingest_curves(curves_path, grid_path);
  Eigen::VectorXd response = fgof::read_response(response_path);
  bool keep_table = directions_path.has_value();
  fgof::TestResult result = fgof::run_gof(config, curves, response, keep_table);

  std::string json = fgof::result_to_json(result);
  if (out_path) {
    fgof::write_text_file(*out_path, json);
    print_summary(result);
    std::cout << "result written to " << *out_path << "\n";
  } else {
    std::cout << json;
  }
  if (directions_path) {
    std::string csv;
    for (const auto& br : result.by_bandwidth)
      csv += fgof::direction_table_csv(br.direction_table, br.h);
    fgof::write_text_file(*directions_path, csv);
  }
  return 0;
}

int run_sim_cmd(const ConfigFlags& flags, const std::string& scenario_name,
                int n, double deviation, int kl_terms, int mc_reps,
                const std::optional<std::string>& out_path) {
  fgof::Scenario scenario;
  scenario.model = fgof::scenario_from_name(scenario_name);
  scenario.n = n;
  scenario.deviation = deviation;
  scenario.kl_terms = kl_terms;

  fgof::TestConfig config = build_config(flags);
  fgof::BootstrapPlan plan;
  plan.replicates = config.bootstrap_replicates;
  plan.seed = config.seed;
  plan.freeze_direction = config.freeze_direction;
  plan.freeze_model = config.freeze_model;

  fgof::PowerTable table =
      fgof::power_study(scenario, config.bandwidths, config, mc_reps, plan);
  std::string csv = table.to_csv();
  if (out_path) {
    fgof::write_text_file(*out_path, csv);
    std::cout << "power table written to " << *out_path << "\n";
  } else {
    std::cout << csv;
  }
  for (const auto& row : table.rows)
    std::cout << "h = " << row.h << ": rejection rate = " << row.rejection_rate
              << " (se " << row.se << "), gamma0 kept in "
              << 100.0 * row.at_gamma0_rate << "% of replicates\n";
  return 0;
}

int run_fpca_cmd(const std::string& curves_path,
                 const std::optional<std::string>& grid_path,
                 const std::optional<std::string>& response_path,
                 const std::string& model, int m,
                 const std::optional<std::string>& out_path) {
  auto curves = fgof::ingest_curves(curves_path, grid_path);
  std::string report;
  if (response_path) {
    Eigen::VectorXd y = fgof::read_response(*response_path);
    fgof::ModelKind kind = fgof::model_from_name(model);
    fgof::FittedModel fit = kind == fgof::ModelKind::quadratic
                                ? fgof::fit_fqm(curves, y, m)
                                : fgof::fit_flm(curves, y, m);
    report = fgof::model_report(fit);
  } else {
    fgof::FpcaDecomposition decomp = fgof::fpca(curves);
    std::ostringstream out;
    out.precision(10);
    out << "n = " << curves.size() << ", grid points = "
        << curves[0].grid.size() << ", rank = " << decomp.rank() << "\n";
    double total = decomp.eigenvalues.sum();
    double cum = 0.0;
    int show = std::min<int>(10, decomp.rank());
    for (int j = 0; j < show; ++j) {
      cum += decomp.eigenvalues(j);
      out << "theta_" << (j + 1) << " = " << decomp.eigenvalues(j)
          << "  (cumulative share " << (total > 0 ? cum / total : 0.0) << ")\n";
    }
    report = out.str();
  }
  if (out_path) {
    fgof::write_text_file(*out_path, report);
    std::cout << "report written to " << *out_path << "\n";
  } else {
    std::cout << report;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection-based goodness-of-fit testing for regression with "
               "functional covariates"};
  app.set_version_flag("--version", fgof::kVersion);
  app.require_subcommand(1);

  // gof
  auto* gof = app.add_subcommand("gof", "run the test on a dataset");
  ConfigFlags gof_flags;
  std::string gof_curves, gof_response;
  std::optional<std::string> gof_grid, gof_out, gof_directions;
  gof->add_option("--curves", gof_curves, "curve matrix CSV")->required();
  gof->add_option("--response", gof_response,
                  "response CSV (observed errors for --model none)")
      ->required();
  gof->add_option("--grid", gof_grid, "optional grid abscissae file");
  gof->add_option("--out", gof_out, "result JSON path (default: stdout)");
  gof->add_option("--dump-directions", gof_directions,
                  "write per-direction diagnostics CSV");
  add_config_flags(gof, gof_flags);

  // sim
  auto* sim = app.add_subcommand("sim", "run a simulation study");
  ConfigFlags sim_flags;
  std::string sim_scenario;
  int sim_n = 200, sim_kl = 100, sim_reps = 200;
  double sim_dev = 0.0;
  std::optional<std::string> sim_out;
  sim->add_option("--scenario", sim_scenario,
                  "linear_null, linear_vs_quadratic, linear_vs_cubic, "
                  "quadratic_vs_cubic")
      ->required();
  sim->add_option("--n", sim_n, "sample size per replicate");
  sim->add_option("--deviation", sim_dev, "deviation magnitude c or d");
  sim->add_option("--kl-terms", sim_kl, "KL truncation of the Brownian draws");
  sim->add_option("--mc-reps", sim_reps, "Monte Carlo replicates");
  sim->add_option("--out", sim_out, "power table CSV path (default: stdout)");
  add_config_flags(sim, sim_flags);

  // fpca-report
  auto* fp = app.add_subcommand("fpca-report",
                                "FPCA / fitted model report for a dataset");
  std::string fp_curves, fp_model = "linear";
  std::optional<std::string> fp_grid, fp_response, fp_out;
  int fp_m = 3;
  fp->add_option("--curves", fp_curves, "curve matrix CSV")->required();
  fp->add_option("--grid", fp_grid, "optional grid abscissae file");
  fp->add_option("--response", fp_response, "response CSV (enables model fit)");
  fp->add_option("--model", fp_model, "linear or quadratic");
  fp->add_option("--m", fp_m, "model truncation");
  fp->add_option("--out", fp_out, "report path (default: stdout)");

  try {
    app.parse(argc, argv);
    if (gof->parsed())
      return run_gof_cmd(gof_flags, gof_curves, gof_response, gof_grid, gof_out,
                         gof_directions);
    if (sim->parsed())
      return run_sim_cmd(sim_flags, sim_scenario, sim_n, sim_dev, sim_kl,
                         sim_reps, sim_out);
    if (fp->parsed())
      return run_fpca_cmd(fp_curves, fp_grid, fp_response, fp_model, fp_m,
                          fp_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const fgof::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fgof::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const fgof::DegenerateStatisticError& e) {
    std::cerr << "degenerate statistic: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
