#include "fgof/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fgof/parallel.hpp"

namespace fgof {

Eigen::VectorXd draw_multipliers(int n, RngStream& stream) {
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = multiplier_from_normal(stream.normal());
  return z;
}

double CalibrationResult::critical_value(double level) const {
  if (bootstrap_stats.empty() || !(level > 0.0 && level < 1.0))
    throw ConfigError("critical_value: need bootstrap statistics and level in (0,1)");
  std::vector<double> sorted = bootstrap_stats;
  std::sort(sorted.begin(), sorted.end());
  const int b = static_cast<int>(sorted.size());
  int k = static_cast<int>(std::ceil((1.0 - level) * (b + 1)));
  k = std::clamp(k, 1, b);
  return sorted[k - 1];
}

CalibrationResult calibrate(
    double observed_stat, int n, const BootstrapPlan& plan,
    const std::function<double(int, const Eigen::VectorXd&)>& statistic,
    int threads) {
  if (plan.replicates < 1) throw ConfigError("bootstrap: need at least 1 replicate");

  const int B = plan.replicates;
  std::vector<double> stats(B);
  std::vector<char> failed(B, 0);
  parallel_for(B, threads, [&](int b) {
    RngStream stream(plan.seed, stream_purpose::multipliers,
                     static_cast<std::uint64_t>(b));
    Eigen::VectorXd z = draw_multipliers(n, stream);
    try {
      stats[b] = statistic(b, z);
    } catch (const DegenerateStatisticError&) {
      failed[b] = 1;
    }
  });

  CalibrationResult result;
  result.observed_stat = observed_stat;
  result.requested_replicates = B;
  for (int b = 0; b < B; ++b) {
    if (failed[b])
      ++result.failed_replicates;
    else
      result.bootstrap_stats.push_back(stats[b]);
  }
  if (result.failed_replicates * 20 > B)
    throw DegenerateStatisticError(
        "bootstrap: " + std::to_string(result.failed_replicates) + " of " +
        std::to_string(B) + " replicates degenerated (more than 5%)");
  const int b_eff = static_cast<int>(result.bootstrap_stats.size());
  if (b_eff == 0)
    throw DegenerateStatisticError("bootstrap: no usable replicates");
  int count = 0;
  for (double s : result.bootstrap_stats)
    if (s >= observed_stat) ++count;
  result.p_value = static_cast<double>(1 + count) / (b_eff + 1);
  return result;
}

}  // namespace fgof
