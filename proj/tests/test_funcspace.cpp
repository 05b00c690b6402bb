#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fgof/funcspace.hpp"

using namespace fgof;

TEST_SUITE_BEGIN("funcspace");

TEST_CASE("grid construction and validation") {
  Grid g(101);
  CHECK(g.size() == 101);
  CHECK(g.point(0) == 0.0);
  CHECK(g.point(100) == 1.0);
  CHECK(g.spacing() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(g.quad_weights().sum() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(Grid(1), ConfigError);
  CHECK_THROWS_AS(Grid::from_points({0.0, 0.4, 1.0, 0.9}), DataError);
  CHECK_THROWS_AS(Grid::from_points({0.1, 0.5, 1.0}), DataError);
  CHECK_THROWS_AS(Grid::from_points({0.0, 0.3, 1.0}), DataError);
  Grid ok = Grid::from_points({0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(ok.size() == 5);
  CHECK(ok.compatible(Grid(5)));
  CHECK(!ok.compatible(Grid(6)));
}

TEST_CASE("inner product: constants, monomial, orthogonality") {
  Grid g(101);
  Curve ones(g, Eigen::VectorXd::Ones(101));
  CHECK(inner_product(ones, ones) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd tv(101);
  for (int k = 0; k < 101; ++k) tv(k) = g.point(k);
  Curve t(g, tv);
  double tt = inner_product(t, t);
  CHECK(std::abs(tt - 1.0 / 3.0) < 1e-4);
  // trapezoid value of t^2 on 100 intervals is exactly 1/3 + dx^2/6
  CHECK(tt == doctest::Approx(0.33335).epsilon(1e-12));

  Basis kl = kl_sine_basis(g, 5);
  CHECK(std::abs(inner_product(kl.element_curve(0), kl.element_curve(1))) < 1e-3);

  Curve other(Grid(50), Eigen::VectorXd::Zero(50));
  CHECK_THROWS_AS(inner_product(ones, other), GridMismatchError);
}

TEST_CASE("kl sine basis values and orthonormality") {
  Grid g(101);
  Basis kl = kl_sine_basis(g, 5);
  // j = 1 at t = 1: sqrt(2) sin(pi/2) = sqrt(2)
  CHECK(kl.element(0)(100) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-13));
  for (int j = 0; j < 5; ++j) {
    CHECK(kl.element(j)(0) == 0.0);  // sin(0) = 0 exactly
    double norm_sq = inner_product(kl.element_curve(j), kl.element_curve(j));
    CHECK(std::abs(norm_sq - 1.0) < 1e-3);
  }
  CHECK(kl.orthonormality_defect() < 1e-3);
  CHECK_THROWS_AS(kl_sine_basis(g, 0), ConfigError);
}

TEST_CASE("projection: basis element, zero curve, Bessel") {
  Grid g(101);
  Basis kl = kl_sine_basis(g, 4);
  std::vector<Curve> sample;
  sample.push_back(kl.element_curve(1));               // X = rho_2
  sample.push_back(Curve(g, Eigen::VectorXd::Zero(101)));

  std::mt19937_64 eng(7);
  std::normal_distribution<double> normal;
  Eigen::VectorXd noise(101);
  for (int k = 0; k < 101; ++k) noise(k) = normal(eng);
  sample.push_back(Curve(g, noise));

  ScoreMatrix s = project(sample, kl);
  CHECK(s.rows() == 3);
  CHECK(s.cols() == 4);
  CHECK(std::abs(s(0, 0)) < 1e-3);
  CHECK(s(0, 1) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(s(0, 2)) < 1e-3);
  CHECK(s.row(1).cwiseAbs().maxCoeff() == 0.0);

  // Bessel: ||X||^2 >= sum of squared scores (quadrature slack)
  double norm_sq = inner_product(sample[2], sample[2]);
  CHECK(norm_sq >= s.row(2).squaredNorm() - 1e-3);
}

TEST_CASE("exact span round trip and score-norm identity") {
  Grid g(101);
  Basis kl = kl_sine_basis(g, 6);
  Eigen::VectorXd coef(6);
  coef << 0.7, -1.2, 0.3, 0.0, 2.0, -0.4;
  Eigen::VectorXd values = Eigen::VectorXd::Zero(101);
  for (int j = 0; j < 6; ++j) values += coef(j) * kl.element(j);
  Curve f(g, values);

  std::vector<Curve> one{f};
  ScoreMatrix s = project(one, kl);
  Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(101);
  for (int j = 0; j < 6; ++j) rebuilt += s(0, j) * kl.element(j);
  double rel = std::sqrt(trapz(g, (values - rebuilt).array().square().matrix())) /
               std::sqrt(trapz(g, values.array().square().matrix()));
  CHECK(rel < 1e-6);

  // ||X^(p)|| coincides with the euclidean norm of the score row
  double lhs = std::sqrt(trapz(g, rebuilt.array().square().matrix()));
  CHECK(lhs == doctest::Approx(s.row(0).norm()).epsilon(1e-6));
}

TEST_CASE("inner product is symmetric and bilinear") {
  Grid g(51);
  std::mt19937_64 eng(11);
  std::normal_distribution<double> normal;
  auto rand_curve = [&] {
    Eigen::VectorXd v(51);
    for (int k = 0; k < 51; ++k) v(k) = normal(eng);
    return Curve(g, v);
  };
  Curve a = rand_curve(), b = rand_curve(), c = rand_curve();
  CHECK(inner_product(a, b) == inner_product(b, a));
  Curve combo(g, 2.5 * b.values + 0.75 * c.values);
  CHECK(inner_product(a, combo) ==
        doctest::Approx(2.5 * inner_product(a, b) + 0.75 * inner_product(a, c))
            .epsilon(1e-12));
}

TEST_CASE("gram-schmidt re-orthonormalization on request") {
  Grid g(101);
  Basis kl = kl_sine_basis(g, 3);
  // Skewed family: mix the elements so they are no longer orthonormal.
  std::vector<Eigen::VectorXd> mixed{kl.element(0),
                                     kl.element(0) + kl.element(1),
                                     kl.element(2) - 0.5 * kl.element(0)};
  Basis skewed(g, mixed);
  CHECK(skewed.orthonormality_defect() > 0.1);
  Basis fixed = skewed.orthonormalized();
  CHECK(fixed.orthonormality_defect() < 1e-10);
}

TEST_CASE("curve validation") {
  Grid g(11);
  CHECK_THROWS_AS(Curve(g, Eigen::VectorXd::Zero(10)), DataError);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(11);
  bad(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Curve(g, bad), DataError);
}

TEST_SUITE_END();
