#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "fgof/errors.hpp"
#include "fgof/funcspace.hpp"

namespace fgof {

enum class KernelType { epanechnikov, gaussian };

// Kernels are used unnormalized (epanechnikov is 1-x^2 on [-1,1], gaussian
// is exp(-x^2/2)); a scale factor would rescale Q_n and the variance
// estimates jointly and cancel in the standardized statistic.
struct Kernel {
  KernelType type = KernelType::epanechnikov;
  double scale = 1.0;

  double operator()(double x) const {
    if (type == KernelType::epanechnikov) {
      double w = 1.0 - x * x;
      return w > 0.0 ? scale * w : 0.0;
    }
    return scale * std::exp(-0.5 * x * x);
  }
  // Compactly supported kernels allow the pair scan to stop once the sorted
  // projection differences leave the window.
  bool compact_support() const { return type == KernelType::epanechnikov; }

  static Kernel epanechnikov() { return {KernelType::epanechnikov, 1.0}; }
  static Kernel gaussian() { return {KernelType::gaussian, 1.0}; }
};

KernelType kernel_from_name(const std::string& name);
std::string kernel_name(KernelType type);

enum class VarianceChoice { min_tau, conditional };

VarianceChoice variance_from_name(const std::string& name);
std::string variance_name(VarianceChoice v);

// Projections <X_i, gamma> in score space, brought to a canonical form:
// the sign of gamma is flipped when its first nonzero coordinate is
// negative (the statistics are even in gamma) and the sample is processed
// in projection order.  This makes the floating-point result of every pair
// sum identical for gamma and -gamma and invariant under permutations of
// the sample whenever the projected values are distinct.
class ProjectionEngine {
 public:
  ProjectionEngine(const ScoreMatrix& scores, const Eigen::VectorXd& gamma);

  int size() const { return static_cast<int>(sorted_.size()); }
  const Eigen::VectorXd& sorted_projections() const { return sorted_; }
  const std::vector<int>& order() const { return order_; }
  // Projections in original sample order (canonical sign).
  Eigen::VectorXd projections_original_order() const;

  // Sum over ordered pairs i != j of a_i a_j K_h^power(pi_i - pi_j); `a` is
  // in original sample order.
  double pair_sum(const Eigen::VectorXd& a, double h, const Kernel& k,
                  int power) const;

  struct QTau {
    double q_sum;    // sum over ordered pairs of u_i u_j K_h
    double tau_sum;  // sum over ordered pairs of u_i^2 u_j^2 K_h^2
  };
  QTau q_tau_sums(const Eigen::VectorXd& u, double h, const Kernel& k) const;
  double q_sum_only(const Eigen::VectorXd& u, double h, const Kernel& k) const;

 private:
  Eigen::VectorXd gather(const Eigen::VectorXd& a) const;
  Eigen::VectorXd sorted_;
  std::vector<int> order_;
};

// Q_n(gamma) = 1/(n(n-1)h) sum_{i != j} U_i U_j K((<X_i - X_j, gamma>)/h)
double q_n(const Eigen::VectorXd& u, const ScoreMatrix& scores,
           const Eigen::VectorXd& gamma, double h, const Kernel& k);

// tau^2(gamma) = 2/(n(n-1)h) sum_{i != j} U_i^2 U_j^2 K^2((<X_i - X_j, gamma>)/h)
double tau_hat_sq(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                  const Eigen::VectorXd& gamma, double h, const Kernel& k);

double v_hat_sq_min(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                    const Eigen::VectorXd& gamma_hat,
                    const Eigen::VectorXd& gamma0, double h, const Kernel& k);

// Uniform-kernel estimate of E[U^2 | projection = t]; an empty window falls
// back to the global mean of U^2.
double sigma_hat_sq(double t, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& proj, double h_v);

// sigma_hat_sq evaluated at every sample projection, O(n log n).
Eigen::VectorXd sigma_hat_sq_profile(const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& proj, double h_v);

double v_hat_sq_cond(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                     const Eigen::VectorXd& gamma0, double h, double h_v,
                     const Kernel& k);

struct VarianceSpec {
  VarianceChoice choice = VarianceChoice::conditional;
  Eigen::VectorXd gamma0;
  double h_v = 0.0;  // bandwidth of the conditional variance estimate
};

double variance_estimate(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                         const Eigen::VectorXd& gamma, double h,
                         const Kernel& k, const VarianceSpec& spec);

// T = n h^{1/2} Q_n(gamma) / v_hat(gamma); throws DegenerateStatisticError
// when the variance estimate is not strictly positive.
double standardized_stat(const Eigen::VectorXd& u, const ScoreMatrix& scores,
                         const Eigen::VectorXd& gamma, double h,
                         const Kernel& k, const VarianceSpec& spec);

}  // namespace fgof
