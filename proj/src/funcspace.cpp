#include "fgof/funcspace.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fgof {

namespace {

std::shared_ptr<const Eigen::VectorXd> trapezoid_weights(
    const std::vector<double>& pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::VectorXd w(n);
  double dx = (pts.back() - pts.front()) / (n - 1);
  w.setConstant(dx);
  w(0) *= 0.5;
  w(n - 1) *= 0.5;
  return std::make_shared<const Eigen::VectorXd>(std::move(w));
}

}  // namespace

Grid::Grid(std::shared_ptr<const std::vector<double>> pts, double dx)
    : points_(std::move(pts)), weights_(trapezoid_weights(*points_)), spacing_(dx) {}

Grid::Grid(int size) {
  if (size < 2) throw ConfigError("Grid: need at least 2 points");
  auto pts = std::make_shared<std::vector<double>>(size);
  double dx = 1.0 / (size - 1);
  for (int k = 0; k < size; ++k) (*pts)[k] = k * dx;
  (*pts)[size - 1] = 1.0;
  points_ = std::move(pts);
  weights_ = trapezoid_weights(*points_);
  spacing_ = dx;
}

Grid Grid::from_points(std::vector<double> points) {
  const int n = static_cast<int>(points.size());
  if (n < 2) throw DataError("Grid: need at least 2 points");
  if (points.front() != 0.0 || points.back() != 1.0)
    throw DataError("Grid: points must start at 0 and end at 1");
  double dx = 1.0 / (n - 1);
  for (int k = 1; k < n; ++k) {
    double step = points[k] - points[k - 1];
    if (!(step > 0.0)) throw DataError("Grid: points must be strictly increasing");
    if (std::abs(step - dx) > 1e-12 * std::max(1.0, dx))
      throw DataError("Grid: spacing not uniform at index " + std::to_string(k));
  }
  return Grid(std::make_shared<const std::vector<double>>(std::move(points)), dx);
}

bool Grid::compatible(const Grid& other) const {
  if (points_ == other.points_) return true;
  if (size() != other.size()) return false;
  for (int k = 0; k < size(); ++k)
    if (std::abs(point(k) - other.point(k)) > 1e-12) return false;
  return true;
}

Curve::Curve(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size())
    throw DataError("Curve: value count does not match grid size");
  if (!values.allFinite()) throw DataError("Curve: values must be finite");
}

double trapz(const Grid& grid, const Eigen::VectorXd& values) {
  return grid.quad_weights().dot(values);
}

double inner_product(const Curve& f, const Curve& g) {
  if (!f.grid.compatible(g.grid))
    throw GridMismatchError("inner_product: curves on incompatible grids");
  return f.grid.quad_weights().dot((f.values.array() * g.values.array()).matrix());
}

double l2_norm(const Curve& f) {
  return std::sqrt(f.grid.quad_weights().dot(f.values.array().square().matrix()));
}

Basis::Basis(Grid g, std::vector<Eigen::VectorXd> elements)
    : grid_(std::move(g)), elements_(std::move(elements)) {
  for (const auto& e : elements_) {
    if (e.size() != grid_.size())
      throw DataError("Basis: element length does not match grid");
  }
}

double Basis::orthonormality_defect() const {
  const auto& w = grid_.quad_weights();
  double worst = 0.0;
  for (int i = 0; i < size(); ++i) {
    for (int j = i; j < size(); ++j) {
      double ip = w.dot((elements_[i].array() * elements_[j].array()).matrix());
      double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(ip - target));
    }
  }
  return worst;
}

Basis Basis::orthonormalized() const {
  const auto& w = grid_.quad_weights();
  std::vector<Eigen::VectorXd> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) {
    Eigen::VectorXd v = e;
    for (const auto& u : out) {
      double c = w.dot((v.array() * u.array()).matrix());
      v -= c * u;
    }
    double norm = std::sqrt(w.dot(v.array().square().matrix()));
    if (norm < 1e-12)
      throw DataError("orthonormalized: basis elements are linearly dependent");
    out.push_back(v / norm);
  }
  return Basis(grid_, std::move(out));
}

Basis kl_sine_basis(const Grid& grid, int p) {
  if (p < 1) throw ConfigError("kl_sine_basis: p must be at least 1");
  const int g = grid.size();
  std::vector<Eigen::VectorXd> elems;
  elems.reserve(p);
  for (int j = 1; j <= p; ++j) {
    double omega = (j - 0.5) * std::numbers::pi;
    Eigen::VectorXd v(g);
    for (int k = 0; k < g; ++k)
      v(k) = std::numbers::sqrt2 * std::sin(omega * grid.point(k));
    elems.push_back(std::move(v));
  }
  return Basis(grid, std::move(elems));
}

ScoreMatrix project(std::span<const Curve> sample, const Basis& basis) {
  const int n = static_cast<int>(sample.size());
  const int p = basis.size();
  ScoreMatrix scores(n, p);
  const auto& w = basis.grid().quad_weights();
  for (int i = 0; i < n; ++i) {
    if (!sample[i].grid.compatible(basis.grid()))
      throw GridMismatchError("project: curve " + std::to_string(i) +
                              " is not on the basis grid");
    Eigen::VectorXd weighted = w.array() * sample[i].values.array();
    for (int j = 0; j < p; ++j) scores(i, j) = weighted.dot(basis.element(j));
  }
  return scores;
}

Curve mean_curve(std::span<const Curve> sample) {
  if (sample.empty()) throw DataError("mean_curve: empty sample");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(sample[0].grid.size());
  for (const auto& c : sample) {
    if (!c.grid.compatible(sample[0].grid))
      throw GridMismatchError("mean_curve: curves on incompatible grids");
    acc += c.values;
  }
  return Curve(sample[0].grid, acc / static_cast<double>(sample.size()));
}

}  // namespace fgof
