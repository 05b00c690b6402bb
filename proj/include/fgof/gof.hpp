#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fgof/bootstrap.hpp"
#include "fgof/direction.hpp"
#include "fgof/funcspace.hpp"
#include "fgof/models.hpp"
#include "fgof/teststat.hpp"

namespace fgof {

enum class BasisChoice { kl_sine, fpca };
enum class CalibrationMode { bootstrap, normal };

BasisChoice basis_from_name(const std::string& name);
std::string basis_name(BasisChoice b);
CalibrationMode calibration_from_name(const std::string& name);
std::string calibration_name(CalibrationMode c);

struct TestConfig {
  ModelKind model = ModelKind::linear;
  int p = 3;                      // projection dimension
  BasisChoice basis = BasisChoice::kl_sine;
  int m = 3;                      // model truncation
  std::vector<double> bandwidths = {0.18, 0.30, 0.44, 0.59};
  KernelType kernel = KernelType::epanechnikov;
  double alpha_n = 5.0;
  VarianceChoice variance = VarianceChoice::conditional;
  int grid_size = 0;              // 0: default for p (300 at p=3, 1280 at p=5)
  int refine_fanout = 0;          // 0: 3^(p-1)
  CalibrationMode calibration = CalibrationMode::bootstrap;
  int bootstrap_replicates = 199;
  double level = 0.05;
  std::uint64_t seed = 20260809;
  double h_v = 0.0;               // 0: 0.5 n^{-1/6}
  int threads = 0;                // 0: hardware concurrency
  bool freeze_direction = false;
  bool freeze_model = false;
};

int default_grid_size(int p);
int default_refine_fanout(int p);
double default_h_v(int n);

// Canonical flat key=value form; parse(serialize(c)) == c and
// serialize(parse(t)) is idempotent.
std::string serialize_config(const TestConfig& config);
TestConfig parse_config_text(const std::string& text);
std::vector<double> parse_bandwidths(const std::string& text);
TestConfig load_config_file(const std::string& path);
void apply_config_line(TestConfig& config, const std::string& key,
                       const std::string& value);
std::string config_hash(const TestConfig& config);  // FNV-1a of canonical form

struct BandwidthResult {
  double h = 0.0;
  double t_stat = 0.0;
  Eigen::VectorXd gamma_hat;
  bool at_gamma0 = false;
  double p_normal = 1.0;
  bool has_bootstrap = false;
  CalibrationResult calibration;
  std::vector<DirectionValue> direction_table;

  double p_value(CalibrationMode mode) const {
    return mode == CalibrationMode::bootstrap && has_bootstrap
               ? calibration.p_value
               : p_normal;
  }
};

struct TestResult {
  TestConfig config;
  std::string config_digest;
  std::string version;
  int n = 0;
  int direction_count = 0;
  std::vector<BandwidthResult> by_bandwidth;

  bool reject(int bandwidth_index) const {
    const auto& br = by_bandwidth.at(bandwidth_index);
    return br.p_value(config.calibration) <= config.level;
  }
};

// Full pipeline: (optionally) fit the model, extract residuals, project on
// the basis, select the least favorable direction, standardize, calibrate.
// For model kind none the response vector is the observed error U itself.
TestResult run_gof(const TestConfig& config, std::span<const Curve> X,
                   const Eigen::VectorXd& response,
                   bool keep_direction_table = false);

std::string result_to_json(const TestResult& result);

}  // namespace fgof
