#include "fgof/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fgof {

ModelKind model_from_name(const std::string& name) {
  if (name == "none") return ModelKind::none;
  if (name == "linear") return ModelKind::linear;
  if (name == "quadratic") return ModelKind::quadratic;
  throw ConfigError("unknown model kind: " + name);
}

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::none: return "none";
    case ModelKind::linear: return "linear";
    default: return "quadratic";
  }
}

namespace {

// Uncentered scores <phi_j, X_i> for j < m; this is the one evaluation path
// used both when fitting and when re-deriving residuals, so the two agree
// bitwise on the training sample.
Eigen::MatrixXd uncentered_scores(const FpcaDecomposition& d,
                                  std::span<const Curve> X, int m) {
  const int n = static_cast<int>(X.size());
  const auto& w = d.eigenfunctions.grid().quad_weights();
  Eigen::MatrixXd s(n, m);
  for (int i = 0; i < n; ++i) {
    if (!X[i].grid.compatible(d.eigenfunctions.grid()))
      throw GridMismatchError("model: curve " + std::to_string(i) +
                              " is not on the decomposition grid");
    Eigen::VectorXd weighted = w.array() * X[i].values.array();
    for (int j = 0; j < m; ++j)
      s(i, j) = weighted.dot(d.eigenfunctions.element(j));
  }
  return s;
}

Eigen::VectorXd predict_linear(double intercept, const Eigen::VectorXd& slope,
                               const Eigen::MatrixXd& model_scores) {
  const int n = static_cast<int>(model_scores.rows());
  const int m = static_cast<int>(slope.size());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double acc = intercept;
    for (int j = 0; j < m; ++j) acc += slope(j) * model_scores(i, j);
    out(i) = acc;
  }
  return out;
}

Eigen::VectorXd predict_quadratic(double intercept,
                                  const Eigen::VectorXd& slope,
                                  const Eigen::MatrixXd& quad,
                                  const Eigen::MatrixXd& model_scores,
                                  const Eigen::VectorXd& centers) {
  const int n = static_cast<int>(model_scores.rows());
  const int m = static_cast<int>(slope.size());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double acc = intercept;
    for (int j = 0; j < m; ++j) {
      double xi_j = model_scores(i, j) - centers(j);
      acc += slope(j) * xi_j;
      for (int k = 0; k < m; ++k) {
        double xi_k = model_scores(i, k) - centers(k);
        acc += quad(j, k) * xi_j * xi_k;
      }
    }
    out(i) = acc;
  }
  return out;
}

}  // namespace

FpcaDecomposition fpca(std::span<const Curve> sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) throw ConfigError("fpca: need at least 2 curves");
  const Grid grid = sample[0].grid;
  const int g = grid.size();

  Curve mean = mean_curve(sample);
  Eigen::MatrixXd centered(n, g);
  for (int i = 0; i < n; ++i)
    centered.row(i) = (sample[i].values - mean.values).transpose();

  // 1/n-normalized covariance, symmetrized in the quadrature metric so the
  // discrete eigenpairs approximate the integral operator's.
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
  Eigen::VectorXd w_sqrt = grid.quad_weights().array().sqrt();
  Eigen::MatrixXd weighted =
      w_sqrt.asDiagonal() * cov * w_sqrt.asDiagonal();
  weighted = 0.5 * (weighted + weighted.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(weighted);
  if (solver.info() != Eigen::Success)
    throw DataError("fpca: eigendecomposition failed");

  // Solver returns ascending order; flip to descending and clamp noise.
  Eigen::VectorXd eigenvalues(g);
  Eigen::MatrixXd vectors(g, g);
  for (int j = 0; j < g; ++j) {
    eigenvalues(j) = std::max(solver.eigenvalues()(g - 1 - j), 0.0);
    vectors.col(j) = solver.eigenvectors().col(g - 1 - j);
  }

  double top = eigenvalues(0);
  int rank = 0;
  while (rank < g && eigenvalues(rank) > 1e-12 * top && eigenvalues(rank) > 0.0)
    ++rank;

  std::vector<Eigen::VectorXd> phis;
  phis.reserve(rank);
  for (int j = 0; j < rank; ++j) {
    Eigen::VectorXd phi = vectors.col(j).array() / w_sqrt.array();
    // Sign convention: the coordinate of largest magnitude is positive.
    int arg = 0;
    for (int k = 1; k < g; ++k)
      if (std::abs(phi(k)) > std::abs(phi(arg))) arg = k;
    if (phi(arg) < 0.0) phi = -phi;
    phis.push_back(std::move(phi));
  }
  Basis eigenfunctions(grid, std::move(phis));

  ScoreMatrix scores(n, rank);
  const auto& w = grid.quad_weights();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd weighted_row = w.array() * centered.row(i).transpose().array();
    for (int j = 0; j < rank; ++j)
      scores(i, j) = weighted_row.dot(eigenfunctions.element(j));
  }

  return {std::move(mean), std::move(eigenvalues), std::move(eigenfunctions),
          std::move(scores)};
}

namespace detail {

Eigen::MatrixXd model_scores_for(const FpcaDecomposition& decomp,
                                 std::span<const Curve> X, int m) {
  return uncentered_scores(decomp, X, m);
}

ModelWorkspace make_workspace(ModelKind kind, const FpcaDecomposition& decomp,
                              int m) {
  if (kind == ModelKind::none)
    throw ConfigError("make_workspace: nothing to fit for model kind 'none'");
  if (m < 1) throw ConfigError("fit: truncation m must be at least 1");
  if (m > decomp.rank())
    throw ConfigError("fit: eigenvalue theta_" + std::to_string(m) +
                      " is not strictly positive (covariance rank is " +
                      std::to_string(decomp.rank()) + ")");
  ModelWorkspace ws;
  ws.kind = kind;
  ws.m = m;
  ws.decomposition = &decomp;
  ws.score_centers.resize(m);
  const auto& w = decomp.eigenfunctions.grid().quad_weights();
  Eigen::VectorXd weighted_mean = w.array() * decomp.mean.values.array();
  for (int j = 0; j < m; ++j)
    ws.score_centers(j) = weighted_mean.dot(decomp.eigenfunctions.element(j));
  return ws;
}

void attach_scores(ModelWorkspace& ws, const Eigen::MatrixXd& model_scores) {
  ws.model_scores = model_scores;
  if (ws.kind == ModelKind::quadratic) {
    const int n = static_cast<int>(model_scores.rows());
    const int m = ws.m;
    const int cols = 1 + m + m * (m + 1) / 2;
    if (n <= cols)
      throw ConfigError("fit_fqm: need n > " + std::to_string(cols) +
                        " observations for m = " + std::to_string(m));
    ws.design.resize(n, cols);
    for (int i = 0; i < n; ++i) {
      ws.design(i, 0) = 1.0;
      int col = 1;
      for (int j = 0; j < m; ++j)
        ws.design(i, col++) = model_scores(i, j) - ws.score_centers(j);
      for (int j = 0; j < m; ++j) {
        double xi_j = model_scores(i, j) - ws.score_centers(j);
        for (int k = j; k < m; ++k) {
          double xi_k = model_scores(i, k) - ws.score_centers(k);
          ws.design(i, col++) = xi_j * xi_k;
        }
      }
    }
    ws.design_qr.compute(ws.design);
    if (ws.design_qr.rank() < cols)
      throw DataError("fit_fqm: rank-deficient design (rank " +
                      std::to_string(ws.design_qr.rank()) + " of " +
                      std::to_string(cols) + ")");
  }
}

FitCore fit_with_workspace(const ModelWorkspace& ws, const Eigen::VectorXd& Y) {
  const int n = static_cast<int>(ws.model_scores.rows());
  if (Y.size() != n) throw ConfigError("fit: response length mismatch");
  FitCore core;
  if (ws.kind == ModelKind::linear) {
    const auto& theta = ws.decomposition->eigenvalues;
    double ybar = Y.mean();
    core.slope.resize(ws.m);
    for (int j = 0; j < ws.m; ++j) {
      double g_j = 0.0;
      for (int i = 0; i < n; ++i)
        g_j += (Y(i) - ybar) * (ws.model_scores(i, j) - ws.score_centers(j));
      g_j /= static_cast<double>(n);
      core.slope(j) = g_j / theta(j);
    }
    core.intercept = ybar;
    for (int j = 0; j < ws.m; ++j)
      core.intercept -= core.slope(j) * ws.score_centers(j);
    core.residuals =
        Y - predict_linear(core.intercept, core.slope, ws.model_scores);
  } else {
    Eigen::VectorXd beta = ws.design_qr.solve(Y);
    core.intercept = beta(0);
    core.slope = beta.segment(1, ws.m);
    core.quad = Eigen::MatrixXd::Zero(ws.m, ws.m);
    int col = 1 + ws.m;
    for (int j = 0; j < ws.m; ++j) {
      for (int k = j; k < ws.m; ++k) {
        double b = beta(col++);
        if (j == k) {
          core.quad(j, j) = b;
        } else {
          core.quad(j, k) = 0.5 * b;
          core.quad(k, j) = 0.5 * b;
        }
      }
    }
    core.residuals = Y - predict_quadratic(core.intercept, core.slope, core.quad,
                                           ws.model_scores, ws.score_centers);
  }
  return core;
}

}  // namespace detail

namespace {

FittedModel fit_model(ModelKind kind, std::span<const Curve> X,
                      const Eigen::VectorXd& Y, int m) {
  if (static_cast<int>(X.size()) != Y.size())
    throw DataError("fit: sample size and response length differ");
  FpcaDecomposition decomp = fpca(X);
  detail::ModelWorkspace ws = detail::make_workspace(kind, decomp, m);
  detail::attach_scores(ws, uncentered_scores(decomp, X, m));
  detail::FitCore core = detail::fit_with_workspace(ws, Y);
  return FittedModel{kind,
                     core.intercept,
                     std::move(core.slope),
                     std::move(core.quad),
                     m,
                     std::move(core.residuals),
                     std::move(decomp),
                     std::move(ws.score_centers)};
}

}  // namespace

FittedModel fit_flm(std::span<const Curve> X, const Eigen::VectorXd& Y, int m) {
  return fit_model(ModelKind::linear, X, Y, m);
}

FittedModel fit_fqm(std::span<const Curve> X, const Eigen::VectorXd& Y, int m) {
  return fit_model(ModelKind::quadratic, X, Y, m);
}

Eigen::VectorXd residuals(const FittedModel& model, std::span<const Curve> X,
                          const Eigen::VectorXd& Y) {
  if (model.kind == ModelKind::none)
    throw ConfigError("residuals: model kind 'none' has no fitted part");
  if (static_cast<int>(X.size()) != Y.size())
    throw DataError("residuals: sample size and response length differ");
  Eigen::MatrixXd s = uncentered_scores(model.decomposition, X, model.truncation);
  if (model.kind == ModelKind::linear)
    return Y - predict_linear(model.intercept, model.slope_coeffs, s);
  return Y - predict_quadratic(model.intercept, model.slope_coeffs,
                               model.quad_coeffs, s, model.score_centers);
}

Curve FittedModel::slope_curve() const {
  Eigen::VectorXd values =
      Eigen::VectorXd::Zero(decomposition.eigenfunctions.grid().size());
  for (int j = 0; j < truncation; ++j)
    values += slope_coeffs(j) * decomposition.eigenfunctions.element(j);
  return Curve(decomposition.eigenfunctions.grid(), values);
}

std::string model_report(const FittedModel& model) {
  std::ostringstream out;
  out.precision(10);
  out << "model: " << model_name(model.kind) << "\n";
  out << "truncation m: " << model.truncation << "\n";
  out << "intercept: " << model.intercept << "\n";
  out << "slope coefficients (eigenfunction basis):\n";
  for (int j = 0; j < model.truncation; ++j)
    out << "  b_" << (j + 1) << " = " << model.slope_coeffs(j) << "\n";
  if (model.kind == ModelKind::quadratic) {
    out << "quadratic coefficients (symmetric, centered scores):\n";
    for (int j = 0; j < model.truncation; ++j) {
      out << " ";
      for (int k = 0; k < model.truncation; ++k)
        out << " " << model.quad_coeffs(j, k);
      out << "\n";
    }
  }
  out << "leading eigenvalues:";
  int show = std::min<int>(8, model.decomposition.rank());
  for (int j = 0; j < show; ++j)
    out << " " << model.decomposition.eigenvalues(j);
  out << "\n";
  const auto& r = model.residuals;
  double rms = std::sqrt(r.array().square().mean());
  out << "residuals: n = " << r.size() << ", mean = " << r.mean()
      << ", rms = " << rms << ", min = " << r.minCoeff()
      << ", max = " << r.maxCoeff() << "\n";
  return out.str();
}

}  // namespace fgof
