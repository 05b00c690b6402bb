#pragma once

// Test-only oracles: naive ordered-pair double loops and direct windowed
// averages.  These deliberately share no code with the library's sorted
// pair scans; the unit and acceptance suites compare the two.

#include <Eigen/Dense>
#include <random>

#include "fgof/teststat.hpp"

namespace testutil {

inline double q_n_naive(const Eigen::VectorXd& u,
                        const fgof::ScoreMatrix& scores,
                        const Eigen::VectorXd& gamma, double h,
                        const fgof::Kernel& k) {
  Eigen::VectorXd proj = scores * gamma;
  const int n = static_cast<int>(u.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) acc += u(i) * u(j) * k((proj(i) - proj(j)) / h);
  return acc / (n * (n - 1.0) * h);
}

inline double tau_sq_naive(const Eigen::VectorXd& u,
                           const fgof::ScoreMatrix& scores,
                           const Eigen::VectorXd& gamma, double h,
                           const fgof::Kernel& k) {
  Eigen::VectorXd proj = scores * gamma;
  const int n = static_cast<int>(u.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) {
        double kv = k((proj(i) - proj(j)) / h);
        acc += u(i) * u(i) * u(j) * u(j) * kv * kv;
      }
  return 2.0 * acc / (n * (n - 1.0) * h);
}

inline double sigma_sq_naive(double t, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& proj, double h_v) {
  double acc = 0.0;
  int count = 0;
  for (int i = 0; i < u.size(); ++i)
    if (std::abs(proj(i) - t) <= h_v) {
      acc += u(i) * u(i);
      ++count;
    }
  if (count == 0) return u.array().square().mean();
  return acc / count;
}

inline double v_cond_naive(const Eigen::VectorXd& u,
                           const fgof::ScoreMatrix& scores,
                           const Eigen::VectorXd& gamma0, double h, double h_v,
                           const fgof::Kernel& k) {
  Eigen::VectorXd proj = scores * gamma0;
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd sig(n);
  for (int i = 0; i < n; ++i) sig(i) = sigma_sq_naive(proj(i), u, proj, h_v);
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) {
        double kv = k((proj(i) - proj(j)) / h);
        acc += sig(i) * sig(j) * kv * kv;
      }
  return 2.0 * acc / (n * (n - 1.0) * h);
}

struct RandomInstance {
  Eigen::VectorXd u;
  fgof::ScoreMatrix scores;
  Eigen::VectorXd gamma;
};

inline RandomInstance random_instance(std::mt19937_64& eng, int n, int p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RandomInstance inst;
  inst.u.resize(n);
  for (int i = 0; i < n; ++i) inst.u(i) = normal(eng);
  inst.scores.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) inst.scores(i, j) = normal(eng);
  inst.gamma.resize(p);
  double norm = 0.0;
  while (norm < 1e-3) {
    for (int j = 0; j < p; ++j) inst.gamma(j) = normal(eng);
    norm = inst.gamma.norm();
  }
  inst.gamma /= norm;
  return inst;
}

}  // namespace testutil
