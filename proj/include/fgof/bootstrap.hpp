#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "fgof/errors.hpp"
#include "fgof/rng.hpp"

namespace fgof {

enum class MultiplierKind { mammen_gaussian };

struct BootstrapPlan {
  int replicates = 199;
  std::uint64_t seed = 0;
  MultiplierKind multiplier = MultiplierKind::mammen_gaussian;
  // By default every replicate rebuilds the statistic end to end (refit and
  // re-select); these flags freeze the respective stage at the original.
  bool freeze_direction = false;
  bool freeze_model = false;
};

// Z = V/sqrt(2) + (V^2 - 1)/2 with V standard normal (E Z = 0, E Z^2 = 1).
inline double multiplier_from_normal(double v) {
  return v / std::numbers::sqrt2 + 0.5 * (v * v - 1.0);
}

Eigen::VectorXd draw_multipliers(int n, RngStream& stream);

struct CalibrationResult {
  double observed_stat = 0.0;
  std::vector<double> bootstrap_stats;  // successful replicates, replicate order
  int requested_replicates = 0;
  int failed_replicates = 0;
  double p_value = 1.0;

  // Empirical (1 - level) quantile of the bootstrap statistics.
  double critical_value(double level) const;
};

// Runs the replicate map: for b in [0, plan.replicates), draws n multipliers
// from the per-replicate stream and calls statistic(b, Z).  Replicates that
// throw DegenerateStatisticError are recorded and excluded; more than 5% of
// them is an error.  The p-value convention is (1 + #{stat_b >= observed}) /
// (B_effective + 1).
CalibrationResult calibrate(
    double observed_stat, int n, const BootstrapPlan& plan,
    const std::function<double(int, const Eigen::VectorXd&)>& statistic,
    int threads = 1);

}  // namespace fgof
