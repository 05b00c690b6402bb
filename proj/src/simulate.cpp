#include "fgof/simulate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fgof/parallel.hpp"

namespace fgof {

ScenarioModel scenario_from_name(const std::string& name) {
  if (name == "linear_null") return ScenarioModel::linear_null;
  if (name == "linear_vs_quadratic") return ScenarioModel::linear_vs_quadratic;
  if (name == "linear_vs_cubic") return ScenarioModel::linear_vs_cubic;
  if (name == "quadratic_vs_cubic") return ScenarioModel::quadratic_vs_cubic;
  throw ConfigError("unknown scenario: " + name);
}

std::string scenario_name(ScenarioModel model) {
  switch (model) {
    case ScenarioModel::linear_null: return "linear_null";
    case ScenarioModel::linear_vs_quadratic: return "linear_vs_quadratic";
    case ScenarioModel::linear_vs_cubic: return "linear_vs_cubic";
    default: return "quadratic_vs_cubic";
  }
}

ModelKind scenario_model_kind(ScenarioModel model) {
  return model == ScenarioModel::quadratic_vs_cubic ? ModelKind::quadratic
                                                    : ModelKind::linear;
}

std::vector<Curve> simulate_brownian(int n, const Grid& grid, int kl_terms,
                                     RngStream& stream) {
  if (n < 1) throw ConfigError("simulate_brownian: n must be >= 1");
  if (kl_terms < 1) throw ConfigError("simulate_brownian: need at least 1 KL term");
  const int g = grid.size();

  // Component functions sqrt(2) sin(omega_j t) / omega_j on the grid.
  Eigen::MatrixXd components(kl_terms, g);
  for (int j = 0; j < kl_terms; ++j) {
    double omega = (j + 0.5) * std::numbers::pi;
    for (int k = 0; k < g; ++k)
      components(j, k) = std::numbers::sqrt2 * std::sin(omega * grid.point(k)) / omega;
  }

  Eigen::MatrixXd coeffs(n, kl_terms);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < kl_terms; ++j) coeffs(i, j) = stream.normal();

  Eigen::MatrixXd values = coeffs * components;
  std::vector<Curve> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.emplace_back(grid, values.row(i).transpose());
  return out;
}

double delta_quadratic(const Curve& x, double c) {
  double m = trapz(x.grid, x.values);
  return c * (m * m - 1.0 / 3.0);
}

double delta_cubic(const Curve& x, double d) {
  double m = trapz(x.grid, x.values);
  return d * (m * m * m - m);
}

std::pair<std::vector<Curve>, Eigen::VectorXd> generate_scenario(
    const Scenario& scenario, const Grid& grid, RngStream& stream) {
  if (scenario.model == ScenarioModel::linear_null && scenario.deviation != 0.0)
    throw ConfigError("linear_null scenario requires deviation 0");
  std::vector<Curve> X = simulate_brownian(scenario.n, grid, scenario.kl_terms, stream);
  Eigen::VectorXd Y(scenario.n);
  for (int i = 0; i < scenario.n; ++i) {
    double integral = trapz(grid, X[i].values);
    double systematic = integral;  // a = 0, b(t) = 1
    if (scenario.model == ScenarioModel::quadratic_vs_cubic)
      systematic += 0.6 * integral * integral;  // h(s,t) = 0.6
    double dev = 0.0;
    switch (scenario.model) {
      case ScenarioModel::linear_null:
        break;
      case ScenarioModel::linear_vs_quadratic:
        dev = delta_quadratic(X[i], scenario.deviation);
        break;
      case ScenarioModel::linear_vs_cubic:
      case ScenarioModel::quadratic_vs_cubic:
        dev = delta_cubic(X[i], scenario.deviation);
        break;
    }
    double noise = scenario.noise_sd * stream.normal();
    Y(i) = systematic + dev + noise;
  }
  return {std::move(X), std::move(Y)};
}

std::string PowerTable::to_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "scenario,n,deviation,h,rejection_rate,mc_reps,se,at_gamma0_rate\n";
  for (const auto& r : rows)
    out << r.scenario << ',' << r.n << ',' << r.deviation << ',' << r.h << ','
        << r.rejection_rate << ',' << r.mc_reps << ',' << r.se << ','
        << r.at_gamma0_rate << "\n";
  return out.str();
}

PowerTable power_study(const Scenario& scenario,
                       const std::vector<double>& h_grid,
                       const TestConfig& config, int mc_reps,
                       const BootstrapPlan& plan) {
  if (mc_reps < 1) throw ConfigError("power_study: mc_reps must be >= 1");
  if (h_grid.empty()) throw ConfigError("power_study: empty bandwidth grid");

  TestConfig base = config;
  base.model = scenario_model_kind(scenario.model);
  base.bandwidths = h_grid;
  base.bootstrap_replicates = plan.replicates;
  base.freeze_direction = plan.freeze_direction;
  base.freeze_model = plan.freeze_model;

  const Grid grid(101);
  const int n_h = static_cast<int>(h_grid.size());
  std::vector<std::vector<char>> rejected(mc_reps, std::vector<char>(n_h, 0));
  std::vector<std::vector<char>> at_gamma0(mc_reps, std::vector<char>(n_h, 0));
  int threads = resolve_threads(config.threads);

  parallel_for(mc_reps, threads, [&](int rep) {
    RngStream data_stream(config.seed, stream_purpose::data,
                          static_cast<std::uint64_t>(rep));
    auto [X, Y] = generate_scenario(scenario, grid, data_stream);
    TestConfig rep_config = base;
    rep_config.seed = derive_seed(config.seed, stream_purpose::replication,
                                  static_cast<std::uint64_t>(rep));
    rep_config.threads = 1;
    TestResult result = run_gof(rep_config, X, Y);
    for (int k = 0; k < n_h; ++k) {
      rejected[rep][k] = result.reject(k) ? 1 : 0;
      at_gamma0[rep][k] = result.by_bandwidth[k].at_gamma0 ? 1 : 0;
    }
  });

  PowerTable table;
  for (int k = 0; k < n_h; ++k) {
    int count = 0, g0 = 0;
    for (int rep = 0; rep < mc_reps; ++rep) {
      count += rejected[rep][k];
      g0 += at_gamma0[rep][k];
    }
    double rate = static_cast<double>(count) / mc_reps;
    PowerRow row;
    row.scenario = scenario_name(scenario.model);
    row.n = scenario.n;
    row.deviation = scenario.deviation;
    row.h = h_grid[k];
    row.rejection_rate = rate;
    row.mc_reps = mc_reps;
    row.se = std::sqrt(rate * (1.0 - rate) / mc_reps);
    row.at_gamma0_rate = static_cast<double>(g0) / mc_reps;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace fgof
