#include <doctest.h>

#include <random>

#include "fgof/teststat.hpp"
#include "testutil.hpp"

using namespace fgof;

TEST_SUITE_BEGIN("teststat");

namespace {

ScoreMatrix identical_rows(int n, int p) {
  ScoreMatrix s(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) s(i, j) = 0.3 * (j + 1);
  return s;
}

}  // namespace

TEST_CASE("hand-computed two-point values") {
  // n = 2, U = (1,1), X_1 = X_2, h = 1, epanechnikov: Q_n = K(0) = 1,
  // tau^2 = 2 K(0)^2 = 2.
  ScoreMatrix s = identical_rows(2, 3);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd gamma = Eigen::Vector3d(1.0, 0.0, 0.0);
  Kernel k = Kernel::epanechnikov();
  CHECK(q_n(u, s, gamma, 1.0, k) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tau_hat_sq(u, s, gamma, 1.0, k) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("zero residuals give zero statistics") {
  std::mt19937_64 eng(3);
  auto inst = testutil::random_instance(eng, 8, 3);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(8);
  Kernel k = Kernel::epanechnikov();
  CHECK(q_n(zero, inst.scores, inst.gamma, 0.5, k) == 0.0);
  CHECK(tau_hat_sq(zero, inst.scores, inst.gamma, 0.5, k) == 0.0);
  CHECK(v_hat_sq_min(zero, inst.scores, inst.gamma, inst.gamma, 0.5, k) == 0.0);
  VarianceSpec spec{VarianceChoice::min_tau, inst.gamma, 0.3};
  CHECK_THROWS_AS(standardized_stat(zero, inst.scores, inst.gamma, 0.5, k, spec),
                  DegenerateStatisticError);
}

TEST_CASE("random instances match the naive double-loop oracles") {
  std::mt19937_64 eng(17);
  std::uniform_int_distribution<int> nd(4, 12), pd(1, 4);
  const double hs[] = {0.3, 0.8, 2.5};
  for (int it = 0; it < 50; ++it) {
    auto inst = testutil::random_instance(eng, nd(eng), pd(eng));
    double h = hs[it % 3];
    Kernel k = (it % 5 == 0) ? Kernel::gaussian() : Kernel::epanechnikov();
    double q_lib = q_n(inst.u, inst.scores, inst.gamma, h, k);
    double q_ref = testutil::q_n_naive(inst.u, inst.scores, inst.gamma, h, k);
    CHECK(std::abs(q_lib - q_ref) <= 1e-12 * std::max(1.0, std::abs(q_ref)));

    double t_lib = tau_hat_sq(inst.u, inst.scores, inst.gamma, h, k);
    double t_ref = testutil::tau_sq_naive(inst.u, inst.scores, inst.gamma, h, k);
    CHECK(std::abs(t_lib - t_ref) <= 1e-12 * std::max(1.0, t_ref));

    double v_lib = v_hat_sq_cond(inst.u, inst.scores, inst.gamma, h, 0.4, k);
    double v_ref = testutil::v_cond_naive(inst.u, inst.scores, inst.gamma, h, 0.4, k);
    CHECK(std::abs(v_lib - v_ref) <= 1e-12 * std::max(1.0, v_ref));
  }
}

TEST_CASE("ordered-pair loop equals the unordered-times-two scan") {
  std::mt19937_64 eng(23);
  for (int it = 0; it < 10; ++it) {
    auto inst = testutil::random_instance(eng, 10, 3);
    double q_lib = q_n(inst.u, inst.scores, inst.gamma, 0.7, Kernel::epanechnikov());
    double q_ordered = testutil::q_n_naive(inst.u, inst.scores, inst.gamma, 0.7,
                                           Kernel::epanechnikov());
    CHECK(std::abs(q_lib - q_ordered) <= 1e-12);
  }
}

TEST_CASE("tau scaling: u -> c u multiplies tau^2 by c^4") {
  std::mt19937_64 eng(29);
  auto inst = testutil::random_instance(eng, 10, 2);
  Kernel k = Kernel::epanechnikov();
  double base = tau_hat_sq(inst.u, inst.scores, inst.gamma, 0.8, k);
  double scaled = tau_hat_sq(3.0 * inst.u, inst.scores, inst.gamma, 0.8, k);
  CHECK(scaled == doctest::Approx(81.0 * base).epsilon(1e-12));
}

TEST_CASE("standardized statistic is invariant to positive rescaling") {
  std::mt19937_64 eng(31);
  auto inst = testutil::random_instance(eng, 30, 3);
  Kernel k = Kernel::epanechnikov();
  for (VarianceChoice choice : {VarianceChoice::min_tau, VarianceChoice::conditional}) {
    VarianceSpec spec{choice, inst.gamma, 0.4};
    double t0 = standardized_stat(inst.u, inst.scores, inst.gamma, 0.9, k, spec);
    for (double c : {0.1, 7.3}) {
      double tc = standardized_stat(c * inst.u, inst.scores, inst.gamma, 0.9, k, spec);
      CHECK(std::abs(tc - t0) <= 1e-12 * std::abs(t0));
    }
  }
}

TEST_CASE("sign symmetry is bitwise") {
  std::mt19937_64 eng(37);
  auto inst = testutil::random_instance(eng, 25, 4);
  Kernel k = Kernel::epanechnikov();
  double plus = q_n(inst.u, inst.scores, inst.gamma, 0.6, k);
  double minus = q_n(inst.u, inst.scores, -inst.gamma, 0.6, k);
  CHECK(plus == minus);
  double tp = tau_hat_sq(inst.u, inst.scores, inst.gamma, 0.6, k);
  double tm = tau_hat_sq(inst.u, inst.scores, -inst.gamma, 0.6, k);
  CHECK(tp == tm);
}

TEST_CASE("permutation invariance is bitwise for distinct projections") {
  std::mt19937_64 eng(41);
  auto inst = testutil::random_instance(eng, 20, 3);
  Kernel k = Kernel::epanechnikov();
  double base_q = q_n(inst.u, inst.scores, inst.gamma, 0.8, k);

  std::vector<int> perm(20);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), eng);
  Eigen::VectorXd pu(20);
  ScoreMatrix ps(20, 3);
  for (int i = 0; i < 20; ++i) {
    pu(i) = inst.u(perm[i]);
    ps.row(i) = inst.scores.row(perm[i]);
  }
  CHECK(q_n(pu, ps, inst.gamma, 0.8, k) == base_q);

  VarianceSpec spec{VarianceChoice::conditional, inst.gamma, 0.4};
  CHECK(standardized_stat(pu, ps, inst.gamma, 0.8, k, spec) ==
        standardized_stat(inst.u, inst.scores, inst.gamma, 0.8, k, spec));
}

TEST_CASE("coincident projections reduce to the closed form") {
  const int n = 9;
  ScoreMatrix s = identical_rows(n, 2);
  std::mt19937_64 eng(43);
  std::normal_distribution<double> normal;
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = normal(eng);
  Eigen::VectorXd gamma = Eigen::Vector2d(0.6, 0.8);
  double h = 5.0;
  double sum = u.sum();
  double closed = (sum * sum - u.squaredNorm()) / (n * (n - 1.0) * h);
  CHECK(q_n(u, s, gamma, h, Kernel::epanechnikov()) ==
        doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("sigma_hat_sq: constants, single point, hand instance, fallback") {
  Eigen::VectorXd proj(10);
  for (int i = 0; i < 10; ++i) proj(i) = 0.1 * i;

  Eigen::VectorXd constant = Eigen::VectorXd::Constant(10, -2.5);
  CHECK(sigma_hat_sq(0.35, constant, proj, 0.15) == doctest::Approx(6.25).epsilon(1e-14));

  Eigen::VectorXd u(10);
  for (int i = 0; i < 10; ++i) u(i) = i + 1.0;
  // window [0.17, 0.51] catches projections 0.2, 0.3, 0.4, 0.5 -> U^2 of 9,16,25,36
  CHECK(sigma_hat_sq(0.34, u, proj, 0.17) == doctest::Approx(21.5).epsilon(1e-14));
  // single point window around 0.9
  CHECK(sigma_hat_sq(0.9, u, proj, 0.05) == doctest::Approx(100.0).epsilon(1e-14));
  // empty window falls back to the global mean of U^2 = 385/10
  CHECK(sigma_hat_sq(25.0, u, proj, 0.05) == doctest::Approx(38.5).epsilon(1e-14));

  Eigen::VectorXd profile = sigma_hat_sq_profile(u, proj, 0.15);
  for (int i = 0; i < 10; ++i)
    CHECK(profile(i) == doctest::Approx(testutil::sigma_sq_naive(proj(i), u, proj, 0.15))
                            .epsilon(1e-13));
}

TEST_CASE("conditional variance factorizes for a forced-constant profile") {
  // With sigma^2 forced to a constant s^2 the estimator is s^4 times the
  // plain pair sum of K_h^2.
  std::mt19937_64 eng(47);
  auto inst = testutil::random_instance(eng, 12, 2);
  Kernel k = Kernel::epanechnikov();
  double h = 0.9, s2 = 3.7;
  ProjectionEngine engine(inst.scores, inst.gamma);
  Eigen::VectorXd forced = Eigen::VectorXd::Constant(12, s2);
  double n = 12.0;
  double lhs = 2.0 * engine.pair_sum(forced, h, k, 2) / (n * (n - 1.0) * h);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(12);
  double pair_k2 = 2.0 * engine.pair_sum(ones, h, k, 2) / (n * (n - 1.0) * h);
  CHECK(lhs == doctest::Approx(s2 * s2 * pair_k2).epsilon(1e-12));

  // v_hat_sq_cond reduces to tau_hat_sq when the profile is replaced by U^2.
  Eigen::VectorXd u2 = inst.u.array().square();
  double reduced = 2.0 * engine.pair_sum(u2, h, k, 2) / (n * (n - 1.0) * h);
  CHECK(reduced == doctest::Approx(tau_hat_sq(inst.u, inst.scores, inst.gamma, h, k))
                       .epsilon(1e-12));
}

TEST_CASE("kernel normalization cancels in the standardized statistic") {
  std::mt19937_64 eng(53);
  auto inst = testutil::random_instance(eng, 25, 3);
  VarianceSpec spec{VarianceChoice::min_tau, inst.gamma, 0.4};
  Kernel plain = Kernel::epanechnikov();
  Kernel normalized{KernelType::epanechnikov, 0.75};
  double t_plain = standardized_stat(inst.u, inst.scores, inst.gamma, 0.8, plain, spec);
  double t_norm =
      standardized_stat(inst.u, inst.scores, inst.gamma, 0.8, normalized, spec);
  CHECK(t_norm == doctest::Approx(t_plain).epsilon(1e-12));
}

TEST_CASE("input validation") {
  ScoreMatrix s = identical_rows(1, 2);
  Eigen::VectorXd u1 = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd gamma = Eigen::Vector2d(1.0, 0.0);
  Kernel k = Kernel::epanechnikov();
  CHECK_THROWS_AS(q_n(u1, s, gamma, 1.0, k), ConfigError);  // n < 2
  ScoreMatrix s2 = identical_rows(4, 2);
  Eigen::VectorXd u4 = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(q_n(u4, s2, gamma, 0.0, k), ConfigError);  // h <= 0
  CHECK_THROWS_AS(q_n(u4, s2, 2.0 * gamma, 1.0, k), ConfigError);  // not unit
}

TEST_SUITE_END();
