#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "whitelasso/datagen.hpp"
#include "whitelasso/solver.hpp"

namespace whitelasso {

// Constants of the tail and rate bounds. K and c are absolute constants the
// theory leaves unpinned; they default to 1 and only rescale the formulas.
struct TheoryConstants {
  double K = 1.0;
  double c = 1.0;
  double tau = 2.0;
  double C_prop3 = 1.0;  // constant of the relative AR-estimation error bound

  // Run configurations: everything positive and tau > 1.
  void validate() const;
  // Formula evaluation only needs positive constants, so tau = 1 is accepted.
  void check_evaluable() const;
};

// sqrt(30) * 2^3 * (c * kappa * sigma_u^2)^(-1/2).
double prop3_constant(double c, double kappa, double sigma_u);

// sqrt(ln r / n). Throws std::invalid_argument for r <= 1 or n <= 0.
double delta_scaling(double n, double r);
// Same with ln r supplied directly, so that r = p^(s tau) never overflows.
double delta_scaling_log(double n, double log_r);

// (4K / sqrt(c)) * delta((1 - rho^2) n, p^tau).
double lambda_lasso_theoretical(const TheoryConstants& consts, double n, double p, double rho);

// (1 + rho^2 C delta((1 - rho^2) n, p^(s tau)))^(1/2).
double fgls_inflation(const TheoryConstants& consts, double n, double p, int s, double rho);

// (4 / sqrt(c)) * fgls_inflation * delta(n, p^tau).
double lambda_fgls_theoretical(const TheoryConstants& consts, double n, double p, int s, double rho);

struct CvResult {
  std::vector<double> lambda_grid;     // as supplied
  std::vector<double> validation_mse;  // aligned with lambda_grid
  double chosen_lambda = 0.0;
  int chosen_index = 0;  // zero-based position in lambda_grid
};

// `length` log-spaced values from lambda_max = ||X'y||_inf / n down to
// 1e-3 * lambda_max. Throws DegenerateInput when lambda_max is zero.
std::vector<double> default_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int length = 50);

// Two-fold cross-validation with the first and second halves of the sample as
// folds. Each lambda is fit on one half and scored by mean squared prediction
// error on the other, in both directions, and the two errors are averaged.
//   Lasso: raw data.
//   GlsKnownRho: the full series is whitened with the known rho, then split.
//   Fgls: per training half and lambda, rho is estimated from the residuals of
//         a lasso fit on that half; the full series is whitened with it.
// Minimum validation error wins, ties go to the larger lambda. The grid may
// be in any order; fits always run along the decreasing path with warm starts.
CvResult cv_two_fold(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const EstimatorKind& estimator,
                     const std::vector<double>& grid, const SolverConfig& base = {});

// Grid lambda whose lasso fit on `holdout` lands closest to beta0 in l2.
// Requires both datasets to share p and beta0.
double oracle_holdout_lambda(const SimulatedDataset& train, const SimulatedDataset& holdout,
                             const std::vector<double>& grid, const SolverConfig& base = {});

enum class TuningMode { CrossValidation, Fixed, Theory };

struct TuningOptions {
  TuningMode mode = TuningMode::CrossValidation;
  double lambda = 0.0;  // Fixed: used for every stage
  int grid_length = 50;
  TheoryConstants theory;
  double theory_rho = 0.0;  // rho entering the lasso / first-stage theory lambda
  int theory_s = 1;         // sparsity entering the second-stage FGLS theory lambda
  SolverConfig solver;      // tol, max_sweeps, standardize; lambda is overwritten

  void validate() const;
};

struct TunedFit {
  LassoFit fit;
  double lambda = 0.0;
  std::optional<CvResult> cv;
  // FGLS only.
  std::optional<ArFitResult> ar;
  double stage1_lambda = 0.0;
};

// Selects lambda per `options` and fits `estimator` on the full sample. FGLS
// runs the lasso (tuned the same way), estimates rho from its residuals and
// tunes the second stage on data whitened with that estimate. A lasso result
// for the same data and options may be passed to skip the first stage.
TunedFit fit_tuned(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const EstimatorKind& estimator,
                   const TuningOptions& options, const TunedFit* stage1 = nullptr);

}  // namespace whitelasso
