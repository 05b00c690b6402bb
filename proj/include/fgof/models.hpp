#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>

#include "fgof/funcspace.hpp"

namespace fgof {

// Eigendecomposition of the 1/n-normalized empirical covariance operator,
// solved on the quadrature-weighted grid so the discrete eigenpairs track
// the integral operator's.
struct FpcaDecomposition {
  Curve mean;                   // sample mean curve
  Eigen::VectorXd eigenvalues;  // all grid eigenvalues, descending, clamped at 0
  Basis eigenfunctions;         // components with positive eigenvalue
  ScoreMatrix scores;           // n x rank, centered: <X_i - mean, phi_j>
  int rank() const { return eigenfunctions.size(); }
};

FpcaDecomposition fpca(std::span<const Curve> sample);

enum class ModelKind { none, linear, quadratic };

ModelKind model_from_name(const std::string& name);
std::string model_name(ModelKind kind);

// Fitted regression of a scalar response on a functional covariate.  The
// linear fit stores the functional intercept a-hat and slope coefficients
// b-hat_j in the eigenfunction basis; the quadratic fit stores the
// least-squares coefficients of the centered score regression
// Y ~ 1 + xi_j + xi_j xi_k, with the product terms folded into a symmetric
// matrix.
struct FittedModel {
  ModelKind kind;
  double intercept;
  Eigen::VectorXd slope_coeffs;  // length m
  Eigen::MatrixXd quad_coeffs;   // m x m symmetric; 0 x 0 for the linear fit
  int truncation;
  Eigen::VectorXd residuals;
  FpcaDecomposition decomposition;
  Eigen::VectorXd score_centers;  // <phi_j, mean>, j <= m

  Curve slope_curve() const;  // b-hat(t) = sum_j b-hat_j phi_j(t)
};

FittedModel fit_flm(std::span<const Curve> X, const Eigen::VectorXd& Y, int m);
FittedModel fit_fqm(std::span<const Curve> X, const Eigen::VectorXd& Y, int m);

// U_i = Y_i - prediction(X_i); on the training sample this reproduces
// model.residuals bitwise.
Eigen::VectorXd residuals(const FittedModel& model, std::span<const Curve> X,
                          const Eigen::VectorXd& Y);

// Structured text report: intercept, slope coefficients, eigenvalues,
// truncation, residual summary.
std::string model_report(const FittedModel& model);

namespace detail {

// Reduced fit state reused by the bootstrap: everything that depends only on
// the covariates is computed once, refits touch only the response.
struct ModelWorkspace {
  ModelKind kind = ModelKind::linear;
  int m = 0;
  // Uncentered scores <phi_j, X_i> on the model basis, canonical path for
  // residual evaluation.
  Eigen::MatrixXd model_scores;  // n x m
  Eigen::VectorXd score_centers;
  const FpcaDecomposition* decomposition = nullptr;
  Eigen::MatrixXd design;  // quadratic kind: n x (1 + m + m(m+1)/2)
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> design_qr;
};

ModelWorkspace make_workspace(ModelKind kind, const FpcaDecomposition& decomp,
                              int m);

// Installs the uncentered model scores and, for the quadratic kind, builds
// and factorizes the design matrix.
void attach_scores(ModelWorkspace& ws, const Eigen::MatrixXd& model_scores);

// Uncentered scores <phi_j, X_i> for j < m, the canonical evaluation path
// shared by fitting and residual recomputation.
Eigen::MatrixXd model_scores_for(const FpcaDecomposition& decomp,
                                 std::span<const Curve> X, int m);

struct FitCore {
  double intercept = 0.0;
  Eigen::VectorXd slope;
  Eigen::MatrixXd quad;
  Eigen::VectorXd residuals;
};

FitCore fit_with_workspace(const ModelWorkspace& ws, const Eigen::VectorXd& Y);

}  // namespace detail

}  // namespace fgof
