#include "fgof/teststat.hpp"

#include <algorithm>
#include <numeric>

namespace fgof {

KernelType kernel_from_name(const std::string& name) {
  if (name == "epanechnikov") return KernelType::epanechnikov;
  if (name == "gaussian") return KernelType::gaussian;
  throw ConfigError("unknown kernel: " + name);
}

std::string kernel_name(KernelType type) {
  return type == KernelType::epanechnikov ? "epanechnikov" : "gaussian";
}

VarianceChoice variance_from_name(const std::string& name) {
  if (name == "min") return VarianceChoice::min_tau;
  if (name == "cond") return VarianceChoice::conditional;
  throw ConfigError("unknown variance estimator: " + name);
}

std::string variance_name(VarianceChoice v) {
  return v == VarianceChoice::min_tau ? "min" : "cond";
}

namespace {

void check_pair_inputs(int n, double h) {
  if (n < 2) throw ConfigError("pair statistics need at least 2 observations");
  if (!(h > 0.0)) throw ConfigError("bandwidth h must be positive");
}

void check_unit(const Eigen::VectorXd& gamma) {
  if (std::abs(gamma.norm() - 1.0) > 1e-12)
    throw ConfigError("direction gamma must have unit norm");
}

}  // namespace

ProjectionEngine::ProjectionEngine(const ScoreMatrix& scores,
                                   const Eigen::VectorXd& gamma) {
  if (scores.cols() != gamma.size())
    throw ConfigError("projection: score columns and direction length differ");
  Eigen::VectorXd proj = scores * gamma;
  // Canonical sign: the statistics are even in gamma.
  for (int j = 0; j < gamma.size(); ++j) {
    if (gamma(j) != 0.0) {
      if (gamma(j) < 0.0) proj = -proj;
      break;
    }
  }
  const int n = static_cast<int>(proj.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::sort(order_.begin(), order_.end(), [&](int a, int b) {
    if (proj(a) != proj(b)) return proj(a) < proj(b);
    return a < b;
  });
  sorted_.resize(n);
  for (int k = 0; k < n; ++k) sorted_(k) = proj(order_[k]);
}

Eigen::VectorXd ProjectionEngine::projections_original_order() const {
  Eigen::VectorXd out(size());
  for (int k = 0; k < size(); ++k) out(order_[k]) = sorted_(k);
  return out;
}

Eigen::VectorXd ProjectionEngine::gather(const Eigen::VectorXd& a) const {
  Eigen::VectorXd out(size());
  for (int k = 0; k < size(); ++k) out(k) = a(order_[k]);
  return out;
}

double ProjectionEngine::pair_sum(const Eigen::VectorXd& a, double h,
                                  const Kernel& k, int power) const {
  const int n = size();
  check_pair_inputs(n, h);
  Eigen::VectorXd as = gather(a);
  const double* p = sorted_.data();
  const double* w = as.data();
  const double inv_h = 1.0 / h;
  double acc = 0.0;
  if (k.compact_support()) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double d = p[j] - p[i];
        if (d > h) break;
        double kv = k(d * inv_h);
        double term = kv;
        for (int q = 1; q < power; ++q) term *= kv;
        acc += w[i] * w[j] * term;
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double kv = k((p[j] - p[i]) * inv_h);
        double term = kv;
        for (int q = 1; q < power; ++q) term *= kv;
        acc += w[i] * w[j] * term;
      }
    }
  }
  return 2.0 * acc;  // unordered pairs counted twice
}

ProjectionEngine::QTau ProjectionEngine::q_tau_sums(const Eigen::VectorXd& u,
                                                    double h,
                                                    const Kernel& k) const {
  const int n = size();
  check_pair_inputs(n, h);
  Eigen::VectorXd us = gather(u);
  const double* p = sorted_.data();
  const double* w = us.data();
  const double inv_h = 1.0 / h;
  double acc_q = 0.0, acc_t = 0.0;
  if (k.compact_support()) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double d = p[j] - p[i];
        if (d > h) break;
        double x = w[i] * w[j] * k(d * inv_h);
        acc_q += x;
        acc_t += x * x;
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double x = w[i] * w[j] * k((p[j] - p[i]) * inv_h);
        acc_q += x;
        acc_t += x * x;
      }
    }
  }
  return {2.0 * acc_q, 2.0 * acc_t};
}

double ProjectionEngine::q_sum_only(const Eigen::VectorXd& u, double h,
                                    const Kernel& k) const {
  const int n = size();
  check_pair_inputs(n, h);
  Eigen::VectorXd us = gather(u);
  const double* p = sorted_.data();
  const double* w = us.data();
  const double inv_h = 1.0 / h;
  double acc = 0.0;
  if (k.compact_support()) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double d = p[j] - p[i];
        if (d > h) break;
        acc += w[i] * w[j] * k(d * inv_h);
      }
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        acc += w[i] * w[j] * k((p[j] - p[i]) * inv_h);
  }
  return 2.0 * acc;
}

double q_n(const Eigen::VectorXd& u, const ScoreMatrix& scores,
           const Eigen::VectorXd& gamma, double h, const Kernel& k) {
  check_pair_inputs(static_cast<int>(u.size()), h);
  check_unit(gamma);
  ProjectionEngine eng(scores, gamma);
  double n = static_cast<double>(u.size());
  return eng.q_sum_only(u, h, k) / (n * (n - 1.0) * h);
}

double tau_hat_sq(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                  const Eigen::VectorXd& gamma, double h, const Kernel& k) {
  check_pair_inputs(static_cast<int>(u.size()), h);
  check_unit(gamma);
  ProjectionEngine eng(scores, gamma);
  Eigen::VectorXd u2 = u.array().square();
  double n = static_cast<double>(u.size());
  return 2.0 * eng.pair_sum(u2, h, k, 2) / (n * (n - 1.0) * h);
}

double v_hat_sq_min(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                    const Eigen::VectorXd& gamma_hat,
                    const Eigen::VectorXd& gamma0, double h, const Kernel& k) {
  return std::min(tau_hat_sq(u, scores, gamma_hat, h, k),
                  tau_hat_sq(u, scores, gamma0, h, k));
}

double sigma_hat_sq(double t, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& proj, double h_v) {
  if (u.size() == 0) throw ConfigError("sigma_hat_sq: empty sample");
  if (!(h_v > 0.0)) throw ConfigError("sigma_hat_sq: h_v must be positive");
  double acc = 0.0;
  int count = 0;
  for (int i = 0; i < u.size(); ++i) {
    if (std::abs(proj(i) - t) <= h_v) {
      acc += u(i) * u(i);
      ++count;
    }
  }
  if (count == 0) return u.array().square().mean();
  return acc / count;
}

Eigen::VectorXd sigma_hat_sq_profile(const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& proj, double h_v) {
  const int n = static_cast<int>(u.size());
  if (n == 0) throw ConfigError("sigma_hat_sq_profile: empty sample");
  if (!(h_v > 0.0)) throw ConfigError("sigma_hat_sq_profile: h_v must be positive");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return proj(a) < proj(b); });
  Eigen::VectorXd u2_sorted(n), p_sorted(n);
  for (int k = 0; k < n; ++k) {
    p_sorted(k) = proj(order[k]);
    u2_sorted(k) = u(order[k]) * u(order[k]);
  }
  // Sliding window [lo, hi) with |p_j - p_k| <= h_v; recompute the window sum
  // from a prefix to avoid drift from repeated subtraction.
  Eigen::VectorXd prefix(n + 1);
  prefix(0) = 0.0;
  for (int k = 0; k < n; ++k) prefix(k + 1) = prefix(k) + u2_sorted(k);
  Eigen::VectorXd out(n);
  int lo = 0, hi = 0;
  for (int k = 0; k < n; ++k) {
    while (lo < n && p_sorted(lo) < p_sorted(k) - h_v) ++lo;
    if (hi < k + 1) hi = k + 1;
    while (hi < n && p_sorted(hi) <= p_sorted(k) + h_v) ++hi;
    out(order[k]) = (prefix(hi) - prefix(lo)) / (hi - lo);
  }
  return out;
}

double v_hat_sq_cond(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                     const Eigen::VectorXd& gamma0, double h, double h_v,
                     const Kernel& k) {
  check_pair_inputs(static_cast<int>(u.size()), h);
  check_unit(gamma0);
  ProjectionEngine eng(scores, gamma0);
  Eigen::VectorXd proj = eng.projections_original_order();
  Eigen::VectorXd profile = sigma_hat_sq_profile(u, proj, h_v);
  double n = static_cast<double>(u.size());
  return 2.0 * eng.pair_sum(profile, h, k, 2) / (n * (n - 1.0) * h);
}

double variance_estimate(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                         const Eigen::VectorXd& gamma, double h,
                         const Kernel& k, const VarianceSpec& spec) {
  if (spec.choice == VarianceChoice::min_tau)
    return v_hat_sq_min(u, scores, gamma, spec.gamma0, h, k);
  return v_hat_sq_cond(u, scores, spec.gamma0, h, spec.h_v, k);
}

double standardized_stat(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                         const Eigen::VectorXd& gamma, double h,
                         const Kernel& k, const VarianceSpec& spec) {
  double v2 = variance_estimate(u, scores, gamma, h, k, spec);
  if (!(v2 > 0.0))
    throw DegenerateStatisticError(
        "variance estimate is zero; sample is degenerate for this statistic");
  double n = static_cast<double>(u.size());
  return n * std::sqrt(h) * q_n(u, scores, gamma, h, k) / std::sqrt(v2);
}

}  // namespace fgof
