#include "fgof/direction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fgof/parallel.hpp"
#include "fgof/rng.hpp"
#include "fgof/stats_util.hpp"

namespace fgof {

namespace {

constexpr int kFirstPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                23, 29, 31, 37, 41, 43, 47, 53};

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

bool same_direction(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= 1e-12;
}

// Flip so the first nonzero coordinate is positive.
void canonicalize(Eigen::VectorXd& v) {
  for (int j = 0; j < v.size(); ++j) {
    if (v(j) != 0.0) {
      if (v(j) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

Eigen::VectorXd uninformative_gamma0(int p) {
  if (p < 1) throw ConfigError("uninformative_gamma0: p must be at least 1");
  return Eigen::VectorXd::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
}

DirectionGrid sphere_grid(int p, int target_size, std::uint64_t seed,
                          std::vector<Eigen::VectorXd> include) {
  if (p < 1) throw ConfigError("sphere_grid: p must be at least 1");
  if (target_size < 1) throw ConfigError("sphere_grid: target_size must be >= 1");
  if (p > static_cast<int>(std::size(kFirstPrimes)))
    throw ConfigError("sphere_grid: dimension too large for the Halton bases");

  DirectionGrid grid;
  grid.p = p;
  for (auto& inc : include) {
    if (inc.size() != p) throw ConfigError("sphere_grid: include point of wrong dimension");
    grid.points.push_back(inc);
  }

  RngStream shift_stream(seed, stream_purpose::grid, 0);
  Eigen::VectorXd shift(p);
  for (int j = 0; j < p; ++j) shift(j) = shift_stream.uniform();

  const std::uint64_t max_draws =
      20ULL * static_cast<std::uint64_t>(target_size) + 100ULL;
  int accepted = 0;
  for (std::uint64_t k = 1; accepted < target_size && k <= max_draws; ++k) {
    Eigen::VectorXd v(p);
    for (int j = 0; j < p; ++j) {
      double u = halton(k, kFirstPrimes[j]) + shift(j);
      u -= std::floor(u);
      u = std::clamp(u, 1e-15, 1.0 - 1e-15);
      v(j) = normal_quantile(u);
    }
    double norm = v.norm();
    if (norm < 1e-12) continue;
    v /= norm;
    canonicalize(v);
    bool dup = false;
    for (const auto& existing : grid.points) {
      if (same_direction(existing, v)) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    grid.points.push_back(std::move(v));
    ++accepted;
  }
  grid.refinement_fanout = 1;
  for (int j = 1; j < p; ++j) grid.refinement_fanout *= 3;
  grid.refinement_fanout = std::min(grid.refinement_fanout, 729);
  return grid;
}

std::vector<Eigen::VectorXd> refine_locally(const Eigen::VectorXd& center,
                                            int fanout, double radius) {
  if (std::abs(center.norm() - 1.0) > 1e-12)
    throw ConfigError("refine_locally: center must have unit norm");
  if (fanout < 1) throw ConfigError("refine_locally: fanout must be >= 1");
  if (!(radius > 0.0)) throw ConfigError("refine_locally: radius must be positive");
  const int p = static_cast<int>(center.size());
  if (p == 1 || fanout == 1) return {center};

  // Orthonormal tangent basis at center.
  std::vector<Eigen::VectorXd> tangent;
  for (int j = 0; j < p && static_cast<int>(tangent.size()) < p - 1; ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    v(j) = 1.0;
    v -= center.dot(v) * center;
    for (const auto& t : tangent) v -= t.dot(v) * t;
    double norm = v.norm();
    if (norm > 1e-8) tangent.push_back(v / norm);
  }
  const int q = static_cast<int>(tangent.size());

  // Integer lattice offsets sorted by squared norm, zero offset first.
  int levels = 1;
  while (std::pow(2.0 * levels + 1.0, q) < fanout) ++levels;
  std::vector<std::vector<int>> offsets;
  std::vector<int> cur(q, -levels);
  for (;;) {
    offsets.push_back(cur);
    int d = 0;
    while (d < q && cur[d] == levels) cur[d++] = -levels;
    if (d == q) break;
    ++cur[d];
  }
  std::sort(offsets.begin(), offsets.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              long na = 0, nb = 0;
              for (int x : a) na += static_cast<long>(x) * x;
              for (int x : b) nb += static_cast<long>(x) * x;
              if (na != nb) return na < nb;
              return a < b;
            });
  offsets.resize(fanout);

  double max_norm = 0.0;
  for (const auto& o : offsets) {
    double n2 = 0.0;
    for (int x : o) n2 += static_cast<double>(x) * x;
    max_norm = std::max(max_norm, std::sqrt(n2));
  }
  double step = max_norm > 0.0 ? radius / max_norm : 0.0;

  std::vector<Eigen::VectorXd> out;
  out.reserve(fanout);
  for (const auto& o : offsets) {
    Eigen::VectorXd v = center;
    for (int d = 0; d < q; ++d) v += step * o[d] * tangent[d];
    out.push_back(v / v.norm());
  }
  return out;
}

double direction_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double c = std::abs(a.dot(b));
  return std::acos(std::min(1.0, c));
}

DirectionScan::DirectionScan(ScoreMatrix scores, const DirectionGrid& grid,
                             Eigen::VectorXd gamma0, Kernel kernel, double h,
                             VarianceChoice variance, double h_v,
                             double alpha_n)
    : scores_(std::move(scores)),
      kernel_(kernel),
      h_(h),
      variance_(variance),
      h_v_(h_v),
      alpha_n_(alpha_n),
      refinement_fanout_(grid.refinement_fanout) {
  if (!(h > 0.0)) throw ConfigError("DirectionScan: bandwidth must be positive");
  if (alpha_n < 0.0) throw ConfigError("DirectionScan: alpha_n must be >= 0");
  if (std::abs(gamma0.norm() - 1.0) > 1e-12)
    throw ConfigError("DirectionScan: gamma0 must have unit norm");
  if (variance_ == VarianceChoice::conditional && !(h_v_ > 0.0))
    throw ConfigError("DirectionScan: conditional variance needs h_v > 0");

  candidates_.reserve(grid.points.size() + 1);
  for (const auto& g : grid.points) {
    bool is_g0 = same_direction(g, gamma0);
    candidates_.push_back({g, ProjectionEngine(scores_, g), is_g0});
    if (is_g0 && gamma0_index_ < 0)
      gamma0_index_ = static_cast<int>(candidates_.size()) - 1;
  }
  if (gamma0_index_ < 0) {
    candidates_.push_back({gamma0, ProjectionEngine(scores_, gamma0), true});
    gamma0_index_ = static_cast<int>(candidates_.size()) - 1;
  }
}

void DirectionScan::shared_variances(const Eigen::VectorXd& u, double* tau0_sq,
                                     double* vcond_sq) const {
  const auto& g0 = candidates_[gamma0_index_];
  const double n = static_cast<double>(u.size());
  const double denom = n * (n - 1.0) * h_;
  if (variance_ == VarianceChoice::min_tau) {
    Eigen::VectorXd u2 = u.array().square();
    *tau0_sq = 2.0 * g0.engine.pair_sum(u2, h_, kernel_, 2) / denom;
    *vcond_sq = 0.0;
  } else {
    Eigen::VectorXd proj = g0.engine.projections_original_order();
    Eigen::VectorXd profile = sigma_hat_sq_profile(u, proj, h_v_);
    *vcond_sq = 2.0 * g0.engine.pair_sum(profile, h_, kernel_, 2) / denom;
    *tau0_sq = 0.0;
  }
}

DirectionScan::Evaluation DirectionScan::evaluate(const Candidate& cand,
                                                  const Eigen::VectorXd& u,
                                                  double tau0_sq,
                                                  double vcond_sq) const {
  const double n = static_cast<double>(u.size());
  const double denom = n * (n - 1.0) * h_;
  Evaluation ev;
  if (variance_ == VarianceChoice::min_tau) {
    auto sums = cand.engine.q_tau_sums(u, h_, kernel_);
    ev.q = sums.q_sum / denom;
    ev.var_sq = std::min(2.0 * sums.tau_sum / denom, tau0_sq);
  } else {
    ev.q = cand.engine.q_sum_only(u, h_, kernel_) / denom;
    ev.var_sq = vcond_sq;
  }
  if (!(ev.var_sq > 0.0)) {
    ev.degenerate = true;
    ev.standardized = -std::numeric_limits<double>::infinity();
    return ev;
  }
  ev.standardized = n * std::sqrt(h_) * ev.q / std::sqrt(ev.var_sq);
  return ev;
}

SelectionResult DirectionScan::select(const Eigen::VectorXd& u, bool keep_table,
                                      int threads) const {
  if (u.size() != scores_.rows())
    throw ConfigError("select: residual length does not match the sample");
  double tau0_sq = 0.0, vcond_sq = 0.0;
  shared_variances(u, &tau0_sq, &vcond_sq);

  const int n_cand = static_cast<int>(candidates_.size());
  std::vector<Evaluation> evals(n_cand);
  parallel_for(n_cand, threads, [&](int i) {
    evals[i] = evaluate(candidates_[i], u, tau0_sq, vcond_sq);
  });

  // Penalized argmax; ties go to gamma0 first, then to the lowest index.
  auto objective = [&](const Evaluation& ev, bool is_g0) {
    return ev.standardized - (is_g0 ? 0.0 : alpha_n_);
  };
  int best = -1;
  double best_obj = 0.0;
  for (int i = 0; i < n_cand; ++i) {
    if (evals[i].degenerate) continue;
    double obj = objective(evals[i], candidates_[i].is_gamma0);
    if (best < 0 || obj > best_obj ||
        (obj == best_obj && candidates_[i].is_gamma0 &&
         !candidates_[best].is_gamma0)) {
      best = i;
      best_obj = obj;
    }
  }
  if (best < 0)
    throw DegenerateStatisticError(
        "variance estimate vanished at every candidate direction");

  // One local refinement pass around the winner.
  double radius = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_cand; ++i) {
    if (i == best) continue;
    double d = direction_distance(candidates_[i].gamma, candidates_[best].gamma);
    if (d > 1e-12) radius = std::min(radius, d);
  }
  if (!std::isfinite(radius)) radius = 0.25;

  std::vector<Eigen::VectorXd> refined;
  if (refinement_fanout_ > 1 && radius > 0.0)
    refined = refine_locally(candidates_[best].gamma, refinement_fanout_, radius);

  std::vector<Evaluation> refined_evals(refined.size());
  std::vector<char> refined_is_g0(refined.size(), 0);
  const auto& gamma0 = candidates_[gamma0_index_].gamma;
  parallel_for(static_cast<int>(refined.size()), threads, [&](int i) {
    refined_is_g0[i] = same_direction(refined[i], gamma0) ? 1 : 0;
    Candidate cand{refined[i], ProjectionEngine(scores_, refined[i]),
                   refined_is_g0[i] != 0};
    refined_evals[i] = evaluate(cand, u, tau0_sq, vcond_sq);
  });

  bool best_refined = false;
  int best_ref_index = -1;
  for (int i = 0; i < static_cast<int>(refined.size()); ++i) {
    if (refined_evals[i].degenerate) continue;
    double obj = objective(refined_evals[i], refined_is_g0[i] != 0);
    bool winner_is_g0 =
        best_refined ? refined_is_g0[best_ref_index] != 0 : candidates_[best].is_gamma0;
    if (obj > best_obj ||
        (obj == best_obj && refined_is_g0[i] != 0 && !winner_is_g0)) {
      best_refined = true;
      best_ref_index = i;
      best_obj = obj;
    }
  }

  SelectionResult result;
  if (best_refined) {
    result.gamma_hat = refined[best_ref_index];
    result.stat = refined_evals[best_ref_index].standardized;
    result.at_gamma0 = refined_is_g0[best_ref_index] != 0;
  } else {
    result.gamma_hat = candidates_[best].gamma;
    result.stat = evals[best].standardized;
    result.at_gamma0 = candidates_[best].is_gamma0;
  }
  result.objective = best_obj;

  if (keep_table) {
    result.table.reserve(n_cand + refined.size());
    for (int i = 0; i < n_cand; ++i)
      result.table.push_back({candidates_[i].gamma, evals[i].q, evals[i].var_sq,
                              evals[i].standardized, candidates_[i].is_gamma0,
                              evals[i].degenerate});
    for (int i = 0; i < static_cast<int>(refined.size()); ++i)
      result.table.push_back({refined[i], refined_evals[i].q,
                              refined_evals[i].var_sq,
                              refined_evals[i].standardized,
                              refined_is_g0[i] != 0,
                              refined_evals[i].degenerate});
  }
  return result;
}

double DirectionScan::standardized_at(const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& gamma) const {
  double tau0_sq = 0.0, vcond_sq = 0.0;
  shared_variances(u, &tau0_sq, &vcond_sq);
  Candidate cand{gamma, ProjectionEngine(scores_, gamma),
                 same_direction(gamma, candidates_[gamma0_index_].gamma)};
  Evaluation ev = evaluate(cand, u, tau0_sq, vcond_sq);
  if (ev.degenerate)
    throw DegenerateStatisticError("variance estimate vanished at the direction");
  return ev.standardized;
}

SelectionResult select_direction(const Eigen::VectorXd& u,
                                 const ScoreMatrix& scores,
                                 const DirectionGrid& grid,
                                 const Eigen::VectorXd& gamma0, double h,
                                 const Kernel& k, VarianceChoice variance,
                                 double h_v, double alpha_n, int threads,
                                 bool keep_table) {
  DirectionScan scan(scores, grid, gamma0, k, h, variance, h_v, alpha_n);
  return scan.select(u, keep_table, threads);
}

}  // namespace fgof
