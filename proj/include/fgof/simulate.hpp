#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fgof/gof.hpp"
#include "fgof/rng.hpp"

namespace fgof {

enum class ScenarioModel {
  linear_null,
  linear_vs_quadratic,
  linear_vs_cubic,
  quadratic_vs_cubic,
};

ScenarioModel scenario_from_name(const std::string& name);
std::string scenario_name(ScenarioModel model);
ModelKind scenario_model_kind(ScenarioModel model);

struct Scenario {
  ScenarioModel model = ScenarioModel::linear_null;
  int n = 200;
  double deviation = 0.0;  // c (quadratic deviation) or d (cubic); 0 is the null
  int kl_terms = 100;
  double noise_sd = 1.0;
};

// Truncated Karhunen-Loeve Brownian motion:
// X(t) = sum_{j<=J} x_j sqrt(2) sin((j-1/2) pi t) / ((j-1/2) pi), x_j iid N(0,1).
std::vector<Curve> simulate_brownian(int n, const Grid& grid, int kl_terms,
                                     RngStream& stream);

// c * ((int X)^2 - 1/3); the double integral factorizes.
double delta_quadratic(const Curve& x, double c);

// d * ((int X)^3 - int X); the triple integral factorizes.
double delta_cubic(const Curve& x, double d);

// Draws X and builds Y = systematic part + deviation + noise, with true
// parameters a = 0, b = 1 (and constant quadratic coefficient 0.6 for the
// quadratic scenario).
std::pair<std::vector<Curve>, Eigen::VectorXd> generate_scenario(
    const Scenario& scenario, const Grid& grid, RngStream& stream);

struct PowerRow {
  std::string scenario;
  int n = 0;
  double deviation = 0.0;
  double h = 0.0;
  double rejection_rate = 0.0;
  int mc_reps = 0;
  double se = 0.0;             // sqrt(r(1-r)/reps)
  double at_gamma0_rate = 0.0; // fraction of replicates with gamma_hat = gamma0
};

struct PowerTable {
  std::vector<PowerRow> rows;
  std::string to_csv() const;
};

// Monte Carlo rejection rates of the full test pipeline over a bandwidth
// grid.  Replicates run as independent tasks on split RNG streams; data
// draws depend only on (config.seed, replicate index), so scenarios that
// differ only in the deviation share common random numbers.
PowerTable power_study(const Scenario& scenario,
                       const std::vector<double>& h_grid,
                       const TestConfig& config, int mc_reps,
                       const BootstrapPlan& plan);

}  // namespace fgof
