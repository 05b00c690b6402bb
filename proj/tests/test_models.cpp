#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fgof/models.hpp"
#include "fgof/rng.hpp"
#include "fgof/simulate.hpp"

using namespace fgof;

TEST_SUITE_BEGIN("models");

namespace {

std::vector<Curve> brownian_sample(int n, int kl_terms, std::uint64_t seed,
                                   int grid_points = 101) {
  Grid grid(grid_points);
  RngStream stream(seed);
  return simulate_brownian(n, grid, kl_terms, stream);
}

double slope_l2_error(const FittedModel& model, double target_constant) {
  Curve b = model.slope_curve();
  Eigen::VectorXd diff =
      b.values - Eigen::VectorXd::Constant(b.values.size(), target_constant);
  return std::sqrt(trapz(b.grid, diff.array().square().matrix()));
}

}  // namespace

TEST_CASE("fpca: identical curves give a null spectrum") {
  Grid grid(51);
  Eigen::VectorXd v(51);
  for (int k = 0; k < 51; ++k) v(k) = std::sin(2.0 * k / 50.0);
  std::vector<Curve> sample(5, Curve(grid, v));
  FpcaDecomposition d = fpca(sample);
  CHECK(d.eigenvalues.maxCoeff() <= 1e-12);
  CHECK(d.rank() == 0);
  CHECK_THROWS_AS(fpca(std::span<const Curve>(sample.data(), 1)), ConfigError);
}

TEST_CASE("fpca: Brownian eigenvalues, orthonormality, variance split") {
  auto sample = brownian_sample(500, 100, 2024);
  FpcaDecomposition d = fpca(sample);

  // Brownian eigenvalues are 1/((j - 1/2)^2 pi^2).
  for (int j = 1; j <= 3; ++j) {
    double truth = 1.0 / ((j - 0.5) * (j - 0.5) * std::numbers::pi * std::numbers::pi);
    CHECK(std::abs(d.eigenvalues(j - 1) - truth) < 0.15 * truth);
  }
  CHECK(d.eigenfunctions.orthonormality_defect() < 1e-3);

  // Eigenvalue sum equals the integrated sample variance.
  Eigen::VectorXd pointwise_var = Eigen::VectorXd::Zero(101);
  Curve mean = d.mean;
  for (const auto& x : sample)
    pointwise_var += (x.values - mean.values).array().square().matrix();
  pointwise_var /= static_cast<double>(sample.size());
  double integrated = trapz(mean.grid, pointwise_var);
  CHECK(std::abs(d.eigenvalues.sum() - integrated) < 1e-3 * integrated);

  // Reconstruction with every positive-eigenvalue component.
  const auto& x = sample[7];
  Eigen::VectorXd rebuilt = mean.values;
  for (int j = 0; j < d.rank(); ++j)
    rebuilt += d.scores(7, j) * d.eigenfunctions.element(j);
  double rel = std::sqrt(trapz(mean.grid, (x.values - rebuilt).array().square().matrix())) /
               std::sqrt(trapz(mean.grid, x.values.array().square().matrix()));
  CHECK(rel < 1e-6);
}

TEST_CASE("flm: exact recovery of a slope in the eigenfunction span") {
  auto sample = brownian_sample(60, 6, 4242);
  FpcaDecomposition d = fpca(sample);
  REQUIRE(d.rank() >= 2);
  // b = phi_1 + 0.5 phi_2, Y noiseless.
  Curve b(d.mean.grid,
          (d.eigenfunctions.element(0) + 0.5 * d.eigenfunctions.element(1)).eval());
  Eigen::VectorXd y(60);
  for (int i = 0; i < 60; ++i) y(i) = inner_product(b, sample[i]);

  FittedModel fit = fit_flm(sample, y, 2);
  Curve b_hat = fit.slope_curve();
  Eigen::VectorXd diff = b_hat.values - b.values;
  CHECK(std::sqrt(trapz(b.grid, diff.array().square().matrix())) < 1e-6);
  CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(fit.residuals.mean()) < 1e-10);
}

TEST_CASE("flm: constant response") {
  auto sample = brownian_sample(30, 5, 7);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 4.25);
  FittedModel fit = fit_flm(sample, y, 3);
  CHECK(fit.slope_coeffs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.intercept == doctest::Approx(4.25).epsilon(1e-14));
  CHECK(fit.residuals.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("flm: formula path equals least squares on centered scores") {
  auto sample = brownian_sample(80, 30, 99);
  RngStream noise(11);
  Eigen::VectorXd y(80);
  for (int i = 0; i < 80; ++i)
    y(i) = trapz(sample[i].grid, sample[i].values) + noise.normal();

  const int m = 3;
  FittedModel fit = fit_flm(sample, y, m);

  // Independent OLS of Y on [1, centered scores].
  FpcaDecomposition d = fpca(sample);
  Eigen::MatrixXd design(80, m + 1);
  design.col(0).setOnes();
  design.block(0, 1, 80, m) = d.scores.leftCols(m);
  Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
  for (int j = 0; j < m; ++j)
    CHECK(fit.slope_coeffs(j) == doctest::Approx(beta(j + 1)).epsilon(1e-8));
  // intercept of the centered regression is ybar; translate to a-hat
  double a_check = beta(0);
  for (int j = 0; j < m; ++j) a_check -= fit.slope_coeffs(j) * fit.score_centers(j);
  CHECK(fit.intercept == doctest::Approx(a_check).epsilon(1e-8));
  CHECK(std::abs(fit.residuals.mean()) < 1e-10);
}

TEST_CASE("flm: slope recovery for the constant-one slope") {
  // True model Y = <1, X> + U.
  Grid grid(101);
  Scenario sc;
  sc.model = ScenarioModel::linear_null;
  sc.n = 200;
  RngStream stream(31);
  auto [X, y] = generate_scenario(sc, grid, stream);
  FittedModel fit = fit_flm(X, y, 3);
  CHECK(slope_l2_error(fit, 1.0) < 0.6);
}

TEST_CASE("flm: truncation errors name the failing eigenvalue") {
  auto sample = brownian_sample(20, 2, 15);  // rank is at most 2
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(20, 0.0, 1.0);
  try {
    fit_flm(sample, y, 10);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("theta_10") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_flm(sample, y, 0), ConfigError);
}

TEST_CASE("fqm: exact recovery of the constant-kernel quadratic model") {
  // X spans 4 KL components; with m = 4 the fit is exact for
  // Y = int X + 0.6 (int X)^2.
  auto sample = brownian_sample(80, 4, 77);
  Eigen::VectorXd y(80);
  for (int i = 0; i < 80; ++i) {
    double integral = trapz(sample[i].grid, sample[i].values);
    y(i) = integral + 0.6 * integral * integral;
  }
  FittedModel fit = fit_fqm(sample, y, 4);
  double rms = std::sqrt(fit.residuals.array().square().mean());
  CHECK(rms < 1e-6);
  CHECK(std::abs(fit.residuals.mean()) < 1e-10);
}

TEST_CASE("fqm: constant response, nesting, and design guards") {
  auto sample = brownian_sample(50, 5, 131);
  Eigen::VectorXd y_const = Eigen::VectorXd::Constant(50, -1.5);
  FittedModel fit = fit_fqm(sample, y_const, 2);
  CHECK(fit.intercept == doctest::Approx(-1.5).epsilon(1e-8));
  CHECK(fit.slope_coeffs.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fit.quad_coeffs.cwiseAbs().maxCoeff() < 1e-8);

  RngStream noise(7);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i)
    y(i) = trapz(sample[i].grid, sample[i].values) + noise.normal();
  FittedModel lin = fit_flm(sample, y, 2);
  FittedModel quad = fit_fqm(sample, y, 2);
  double rss_lin = lin.residuals.squaredNorm();
  double rss_quad = quad.residuals.squaredNorm();
  CHECK(rss_quad <= rss_lin + 1e-10);
  // residuals orthogonal to the design
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(50);
  CHECK(std::abs(quad.residuals.dot(ones)) < 1e-8 * y.norm());

  // Too few observations for the design.
  auto tiny = brownian_sample(10, 4, 3);
  Eigen::VectorXd y_tiny = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  CHECK_THROWS_AS(fit_fqm(tiny, y_tiny, 3), ConfigError);
}

TEST_CASE("residuals: bitwise refit, zero case, hand example") {
  auto sample = brownian_sample(40, 5, 55);
  RngStream noise(5);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i)
    y(i) = trapz(sample[i].grid, sample[i].values) + 0.5 * noise.normal();

  for (bool quadratic : {false, true}) {
    FittedModel fit = quadratic ? fit_fqm(sample, y, 2) : fit_flm(sample, y, 2);
    Eigen::VectorXd again = residuals(fit, sample, y);
    REQUIRE(again.size() == fit.residuals.size());
    for (int i = 0; i < 40; ++i) CHECK(again(i) == fit.residuals(i));

    Eigen::VectorXd fitted = y - fit.residuals;
    Eigen::VectorXd zero = residuals(fit, sample, fitted);
    CHECK(zero.cwiseAbs().maxCoeff() < 1e-12);
  }

  // Hand-computed 3-point fit with constant curves x = 0, 1, 2 and
  // y = 1, 2, 4: b-hat = 3/2, a-hat = 5/6, residuals (1/6, -1/3, 1/6).
  Grid g(11);
  std::vector<Curve> constants;
  for (double x : {0.0, 1.0, 2.0})
    constants.emplace_back(g, Eigen::VectorXd::Constant(11, x));
  Eigen::VectorXd y3(3);
  y3 << 1.0, 2.0, 4.0;
  FittedModel hand = fit_flm(constants, y3, 1);
  CHECK(hand.intercept == doctest::Approx(5.0 / 6.0).epsilon(1e-10));
  CHECK(hand.slope_coeffs(0) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(hand.residuals(0) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  CHECK(hand.residuals(1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));
  CHECK(hand.residuals(2) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));

  CHECK(!model_report(hand).empty());
}

TEST_SUITE_END();
