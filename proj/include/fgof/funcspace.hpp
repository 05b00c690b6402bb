#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "fgof/errors.hpp"

namespace fgof {

// Uniform discretization of [0,1] with G >= 2 points.  Immutable and cheap
// to copy; two grids are compatible when they share storage or agree
// pointwise within 1e-12.
class Grid {
 public:
  explicit Grid(int size);
  // Validates: first point 0, last point 1, strictly increasing, uniform
  // spacing within 1e-12 relative.
  static Grid from_points(std::vector<double> points);

  int size() const { return static_cast<int>(points_->size()); }
  double spacing() const { return spacing_; }
  double point(int k) const { return (*points_)[k]; }
  const std::vector<double>& points() const { return *points_; }
  // Trapezoid quadrature weights over [0,1].
  const Eigen::VectorXd& quad_weights() const { return *weights_; }
  bool compatible(const Grid& other) const;

 private:
  Grid(std::shared_ptr<const std::vector<double>> pts, double dx);
  std::shared_ptr<const std::vector<double>> points_;
  std::shared_ptr<const Eigen::VectorXd> weights_;
  double spacing_;
};

// A square-integrable function represented by its values on a grid.
struct Curve {
  Curve(Grid g, Eigen::VectorXd v);
  Grid grid;
  Eigen::VectorXd values;
};

// scores(i, j) = <X_i, rho_j>
using ScoreMatrix = Eigen::MatrixXd;

// Ordered family of functions sharing one grid, nominally orthonormal.
class Basis {
 public:
  Basis(Grid g, std::vector<Eigen::VectorXd> elements);
  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const Eigen::VectorXd& element(int j) const { return elements_[j]; }
  Curve element_curve(int j) const { return Curve(grid_, elements_[j]); }
  // max_{i<=j} |<rho_i, rho_j> - delta_ij| under trapezoid quadrature.
  double orthonormality_defect() const;
  // Gram-Schmidt re-orthonormalization, on explicit request only.
  Basis orthonormalized() const;

 private:
  Grid grid_;
  std::vector<Eigen::VectorXd> elements_;
};

double trapz(const Grid& grid, const Eigen::VectorXd& values);
double inner_product(const Curve& f, const Curve& g);
double l2_norm(const Curve& f);

// rho_j(t) = sqrt(2) sin((j - 1/2) pi t), j = 1..p.
Basis kl_sine_basis(const Grid& grid, int p);

ScoreMatrix project(std::span<const Curve> sample, const Basis& basis);

Curve mean_curve(std::span<const Curve> sample);

}  // namespace fgof
