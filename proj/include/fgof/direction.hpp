#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fgof/teststat.hpp"

namespace fgof {

struct DirectionGrid {
  int p = 0;
  std::vector<Eigen::VectorXd> points;  // unit vectors, canonical hemisphere
  int refinement_fanout = 9;
};

// (1, ..., 1)/sqrt(p): equal weight on every basis element.
Eigen::VectorXd uninformative_gamma0(int p);

// Seeded quasi-uniform directions: a randomly shifted Halton sequence mapped
// through the normal quantile coordinatewise and normalized, then reduced to
// a canonical hemisphere (no pair gamma, -gamma).  `include` points are
// appended verbatim.
DirectionGrid sphere_grid(int p, int target_size, std::uint64_t seed,
                          std::vector<Eigen::VectorXd> include = {});

// Tangent-space lattice of `fanout` unit vectors within geodesic `radius`
// of `center`; the zero offset (center itself) is always the first point.
std::vector<Eigen::VectorXd> refine_locally(const Eigen::VectorXd& center,
                                            int fanout, double radius);

// Geodesic distance on the antipodally reduced sphere.
double direction_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct DirectionValue {
  Eigen::VectorXd gamma;
  double q = 0.0;
  double var_sq = 0.0;
  double standardized = 0.0;
  bool is_gamma0 = false;
  bool degenerate = false;  // variance estimate vanished at this direction
};

struct SelectionResult {
  Eigen::VectorXd gamma_hat;
  double stat = 0.0;       // standardized statistic at gamma_hat (no penalty)
  double objective = 0.0;  // penalized objective at gamma_hat
  bool at_gamma0 = false;
  std::vector<DirectionValue> table;  // filled when requested
};

// Scans a fixed candidate set for the penalized least favorable direction.
// Projection sort orders are cached at construction and reused for every
// residual vector, which is what bootstrap replicates need.
class DirectionScan {
 public:
  DirectionScan(ScoreMatrix scores, const DirectionGrid& grid,
                Eigen::VectorXd gamma0, Kernel kernel, double h,
                VarianceChoice variance, double h_v, double alpha_n);

  // Evaluates every candidate plus gamma0, applies the penalty, picks the
  // argmax (ties: gamma0 first, then lowest candidate index), runs one local
  // refinement pass around the winner and re-selects.
  SelectionResult select(const Eigen::VectorXd& u, bool keep_table = false,
                         int threads = 1) const;

  // Standardized statistic at a single direction under this scan's variance
  // rule (used by frozen-direction bootstrap replicates).
  double standardized_at(const Eigen::VectorXd& u,
                         const Eigen::VectorXd& gamma) const;

  int candidate_count() const { return static_cast<int>(candidates_.size()); }
  double bandwidth() const { return h_; }

 private:
  struct Candidate {
    Eigen::VectorXd gamma;
    ProjectionEngine engine;
    bool is_gamma0;
  };
  struct Evaluation {
    double q = 0.0;
    double var_sq = 0.0;
    double standardized = 0.0;
    bool degenerate = false;
  };

  Evaluation evaluate(const Candidate& cand, const Eigen::VectorXd& u,
                      double tau0_sq, double vcond_sq) const;
  // Variance pieces shared across candidates for one residual vector.
  void shared_variances(const Eigen::VectorXd& u, double* tau0_sq,
                        double* vcond_sq) const;

  ScoreMatrix scores_;
  std::vector<Candidate> candidates_;
  int gamma0_index_ = -1;
  Kernel kernel_;
  double h_;
  VarianceChoice variance_;
  double h_v_;
  double alpha_n_;
  int refinement_fanout_ = 9;
};

// One-shot convenience wrapper around DirectionScan.
SelectionResult select_direction(const Eigen::VectorXd& u,
                                 const ScoreMatrix& scores,
                                 const DirectionGrid& grid,
                                 const Eigen::VectorXd& gamma0, double h,
                                 const Kernel& k, VarianceChoice variance,
                                 double h_v, double alpha_n, int threads = 1,
                                 bool keep_table = false);

}  // namespace fgof
