#include "fgof/gof.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "fgof/parallel.hpp"
#include "fgof/stats_util.hpp"
#include "fgof/version.hpp"

namespace fgof {

BasisChoice basis_from_name(const std::string& name) {
  if (name == "kl_sine") return BasisChoice::kl_sine;
  if (name == "fpca") return BasisChoice::fpca;
  throw ConfigError("unknown basis: " + name);
}

std::string basis_name(BasisChoice b) {
  return b == BasisChoice::kl_sine ? "kl_sine" : "fpca";
}

CalibrationMode calibration_from_name(const std::string& name) {
  if (name == "bootstrap") return CalibrationMode::bootstrap;
  if (name == "normal") return CalibrationMode::normal;
  throw ConfigError("unknown calibration: " + name);
}

std::string calibration_name(CalibrationMode c) {
  return c == CalibrationMode::bootstrap ? "bootstrap" : "normal";
}

int default_grid_size(int p) {
  if (p <= 1) return 1;
  if (p == 3) return 300;
  if (p == 5) return 1280;
  // Geometric interpolation through the two reference sizes.
  double size = 300.0 * std::pow(1280.0 / 300.0, (p - 3) / 2.0);
  return std::max(8, static_cast<int>(std::lround(size)));
}

int default_refine_fanout(int p) {
  int fanout = 1;
  for (int j = 1; j < p; ++j) fanout = std::min(fanout * 3, 729);
  return fanout;
}

double default_h_v(int n) { return 0.5 * std::pow(static_cast<double>(n), -1.0 / 6.0); }

namespace {

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double value = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("invalid number: '" + s + "'");
  return value;
}

long long parse_int(const std::string& s) {
  long long value = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("invalid integer: '" + s + "'");
  return value;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t value = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("invalid unsigned integer: '" + s + "'");
  return value;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("invalid boolean: '" + s + "'");
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<double> parse_bandwidths(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(item));
  }
  if (out.empty()) throw ConfigError("bandwidth list is empty");
  return out;
}

std::string serialize_config(const TestConfig& c) {
  std::ostringstream out;
  out << "model = " << model_name(c.model) << "\n";
  out << "p = " << c.p << "\n";
  out << "basis = " << basis_name(c.basis) << "\n";
  out << "m = " << c.m << "\n";
  out << "h = ";
  for (size_t i = 0; i < c.bandwidths.size(); ++i)
    out << (i ? "," : "") << fmt_double(c.bandwidths[i]);
  out << "\n";
  out << "kernel = " << kernel_name(c.kernel) << "\n";
  out << "alpha_n = " << fmt_double(c.alpha_n) << "\n";
  out << "variance = " << variance_name(c.variance) << "\n";
  out << "grid_size = " << c.grid_size << "\n";
  out << "refine_fanout = " << c.refine_fanout << "\n";
  out << "calibration = " << calibration_name(c.calibration) << "\n";
  out << "B = " << c.bootstrap_replicates << "\n";
  out << "level = " << fmt_double(c.level) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "h_v = " << fmt_double(c.h_v) << "\n";
  out << "threads = " << c.threads << "\n";
  out << "freeze_direction = " << (c.freeze_direction ? "true" : "false") << "\n";
  out << "freeze_model = " << (c.freeze_model ? "true" : "false") << "\n";
  return out.str();
}

void apply_config_line(TestConfig& c, const std::string& key,
                       const std::string& value) {
  if (key == "model") c.model = model_from_name(value);
  else if (key == "p") c.p = static_cast<int>(parse_int(value));
  else if (key == "basis") c.basis = basis_from_name(value);
  else if (key == "m") c.m = static_cast<int>(parse_int(value));
  else if (key == "h") c.bandwidths = parse_bandwidths(value);
  else if (key == "kernel") c.kernel = kernel_from_name(value);
  else if (key == "alpha_n") c.alpha_n = parse_double(value);
  else if (key == "variance") c.variance = variance_from_name(value);
  else if (key == "grid_size") c.grid_size = static_cast<int>(parse_int(value));
  else if (key == "refine_fanout") c.refine_fanout = static_cast<int>(parse_int(value));
  else if (key == "calibration") c.calibration = calibration_from_name(value);
  else if (key == "B") c.bootstrap_replicates = static_cast<int>(parse_int(value));
  else if (key == "level") c.level = parse_double(value);
  else if (key == "seed") c.seed = parse_u64(value);
  else if (key == "h_v") c.h_v = parse_double(value);
  else if (key == "threads") c.threads = static_cast<int>(parse_int(value));
  else if (key == "freeze_direction") c.freeze_direction = parse_bool(value);
  else if (key == "freeze_model") c.freeze_model = parse_bool(value);
  else throw ConfigError("unknown config key: '" + key + "'");
}

TestConfig parse_config_text(const std::string& text) {
  TestConfig config;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    apply_config_line(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return config;
}

TestConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_hash(const TestConfig& config) {
  std::string canon = serialize_config(config);
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char ch : canon) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

namespace {

void validate_config(const TestConfig& c, int n) {
  if (c.p < 1) throw ConfigError("p must be at least 1");
  if (c.model != ModelKind::none && c.m < 1)
    throw ConfigError("m must be at least 1");
  if (c.bandwidths.empty()) throw ConfigError("no bandwidths given");
  for (double h : c.bandwidths)
    if (!(h > 0.0)) throw ConfigError("bandwidths must be positive");
  if (!(c.level > 0.0 && c.level < 1.0))
    throw ConfigError("level must lie in (0,1)");
  if (c.alpha_n < 0.0) throw ConfigError("alpha_n must be >= 0");
  if (c.calibration == CalibrationMode::bootstrap && c.bootstrap_replicates < 1)
    throw ConfigError("bootstrap replicates must be >= 1");
  int m_eff = c.model == ModelKind::none ? 0 : c.m;
  if (n < std::max(10, m_eff + c.p))
    throw ConfigError("need n >= max(10, m + p) observations, got " +
                      std::to_string(n));
}

}  // namespace

TestResult run_gof(const TestConfig& config, std::span<const Curve> X,
                   const Eigen::VectorXd& response, bool keep_direction_table) {
  const int n = static_cast<int>(X.size());
  if (n == 0) throw DataError("run_gof: empty sample");
  if (response.size() != n)
    throw DataError("run_gof: sample size and response length differ");
  validate_config(config, n);
  const Grid grid = X[0].grid;
  const int threads = resolve_threads(config.threads);

  // Model stage: residuals and, for replication, fitted values.
  Eigen::VectorXd u_hat, fitted;
  std::optional<FpcaDecomposition> decomp;
  detail::ModelWorkspace workspace;
  const bool has_model = config.model != ModelKind::none;
  if (has_model) {
    decomp.emplace(fpca(X));
    workspace = detail::make_workspace(config.model, *decomp, config.m);
    detail::attach_scores(workspace,
                          detail::model_scores_for(*decomp, X, config.m));
    detail::FitCore core = detail::fit_with_workspace(workspace, response);
    u_hat = std::move(core.residuals);
    fitted = response - u_hat;
  } else {
    u_hat = response;
  }

  // Projection stage.
  std::optional<Basis> proj_basis;
  if (config.basis == BasisChoice::kl_sine) {
    proj_basis.emplace(kl_sine_basis(grid, config.p));
  } else {
    if (!decomp) decomp.emplace(fpca(X));
    if (decomp->rank() < config.p)
      throw ConfigError("fpca basis has rank " + std::to_string(decomp->rank()) +
                        " < p = " + std::to_string(config.p));
    std::vector<Eigen::VectorXd> elems;
    for (int j = 0; j < config.p; ++j)
      elems.push_back(decomp->eigenfunctions.element(j));
    proj_basis.emplace(grid, std::move(elems));
  }
  ScoreMatrix scores = project(X, *proj_basis);
  Eigen::VectorXd gamma0 = uninformative_gamma0(config.p);

  int grid_size = config.grid_size > 0 ? config.grid_size : default_grid_size(config.p);
  DirectionGrid dgrid = sphere_grid(config.p, grid_size, config.seed);
  dgrid.refinement_fanout = config.refine_fanout > 0
                                ? config.refine_fanout
                                : default_refine_fanout(config.p);
  double h_v = config.h_v > 0.0 ? config.h_v : default_h_v(n);

  TestResult result;
  result.config = config;
  result.config_digest = config_hash(config);
  result.version = kVersion;
  result.n = n;
  result.direction_count = static_cast<int>(dgrid.points.size());

  for (double h : config.bandwidths) {
    DirectionScan scan(scores, dgrid, gamma0, Kernel{config.kernel}, h,
                       config.variance, h_v, config.alpha_n);
    SelectionResult sel = scan.select(u_hat, keep_direction_table, threads);

    BandwidthResult br;
    br.h = h;
    br.t_stat = sel.stat;
    br.gamma_hat = sel.gamma_hat;
    br.at_gamma0 = sel.at_gamma0;
    br.p_normal = 1.0 - normal_cdf(sel.stat);
    br.direction_table = std::move(sel.table);

    if (config.calibration == CalibrationMode::bootstrap) {
      BootstrapPlan plan;
      plan.replicates = config.bootstrap_replicates;
      plan.seed = config.seed;
      plan.freeze_direction = config.freeze_direction;
      plan.freeze_model = config.freeze_model;
      auto replicate = [&](int, const Eigen::VectorXd& z) {
        Eigen::VectorXd u_b;
        if (!has_model || plan.freeze_model) {
          u_b = z.cwiseProduct(u_hat);
        } else {
          Eigen::VectorXd y_b = fitted + z.cwiseProduct(u_hat);
          u_b = detail::fit_with_workspace(workspace, y_b).residuals;
        }
        if (plan.freeze_direction) return scan.standardized_at(u_b, sel.gamma_hat);
        return scan.select(u_b, false, 1).stat;
      };
      br.calibration = calibrate(sel.stat, n, plan, replicate, threads);
      br.has_bootstrap = true;
    }
    result.by_bandwidth.push_back(std::move(br));
  }
  return result;
}

std::string result_to_json(const TestResult& result) {
  nlohmann::json root;
  root["version"] = result.version;
  root["config_hash"] = result.config_digest;
  nlohmann::json cfg;
  const TestConfig& c = result.config;
  cfg["model"] = model_name(c.model);
  cfg["p"] = c.p;
  cfg["basis"] = basis_name(c.basis);
  cfg["m"] = c.m;
  cfg["h"] = c.bandwidths;
  cfg["kernel"] = kernel_name(c.kernel);
  cfg["alpha_n"] = c.alpha_n;
  cfg["variance"] = variance_name(c.variance);
  cfg["grid_size"] = c.grid_size;
  cfg["refine_fanout"] = c.refine_fanout;
  cfg["calibration"] = calibration_name(c.calibration);
  cfg["B"] = c.bootstrap_replicates;
  cfg["level"] = c.level;
  cfg["seed"] = c.seed;
  cfg["h_v"] = c.h_v;
  cfg["threads"] = c.threads;
  cfg["freeze_direction"] = c.freeze_direction;
  cfg["freeze_model"] = c.freeze_model;
  root["config"] = cfg;
  root["n"] = result.n;
  root["direction_count"] = result.direction_count;

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& br : result.by_bandwidth) {
    nlohmann::json row;
    row["h"] = br.h;
    row["t_stat"] = br.t_stat;
    row["gamma_hat"] = std::vector<double>(br.gamma_hat.data(),
                                           br.gamma_hat.data() + br.gamma_hat.size());
    row["at_gamma0"] = br.at_gamma0;
    row["p_normal"] = br.p_normal;
    row["p_normal_pct"] = 100.0 * br.p_normal;
    if (br.has_bootstrap) {
      row["p_bootstrap"] = br.calibration.p_value;
      row["p_bootstrap_pct"] = 100.0 * br.calibration.p_value;
      nlohmann::json boot;
      boot["replicates"] = br.calibration.requested_replicates;
      boot["failed"] = br.calibration.failed_replicates;
      boot["critical_value"] = br.calibration.critical_value(c.level);
      boot["stats"] = br.calibration.bootstrap_stats;
      row["bootstrap"] = boot;
    }
    row["reject"] = br.p_value(c.calibration) <= c.level;
    rows.push_back(row);
  }
  root["results"] = rows;
  return root.dump(2) + "\n";
}

}  // namespace fgof
