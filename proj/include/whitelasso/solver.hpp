#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "whitelasso/whiten.hpp"

namespace whitelasso {

struct SolverConfig {
  double lambda = 0.0;
  double tol = 1e-7;        // max coefficient change over a full sweep
  int max_sweeps = 10000;   // counts full sweeps and active-set passes
  std::optional<Eigen::VectorXd> warm_start;
  bool standardize = false;  // rescale columns to x_j'x_j/n = 1 before fitting
  // Called after every full sweep with (full sweep number from 1, objective).
  std::function<void(int, double)> on_sweep;

  void validate() const;
};

struct LassoFit {
  Eigen::VectorXd beta;
  int sweeps = 0;
  bool converged = false;
  double objective = 0.0;      // (1/2n)||y - X beta||^2 + lambda ||beta||_1
  double kkt_violation = 0.0;  // max_j stationarity residual
};

struct EstimatorKind {
  enum class Type { Lasso, GlsKnownRho, Fgls };
  Type type = Type::Lasso;
  double rho = 0.0;  // GlsKnownRho only

  static EstimatorKind lasso() { return {}; }
  static EstimatorKind gls(double rho) { return {Type::GlsKnownRho, rho}; }
  static EstimatorKind fgls() { return {Type::Fgls, 0.0}; }

  std::string name() const;
};

std::string estimator_name(EstimatorKind::Type type);
// Accepts "lasso", "gls", "fgls". Throws std::invalid_argument otherwise.
EstimatorKind::Type parse_estimator(const std::string& name);

// sign(z) * max(|z| - t, 0).
inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                       double lambda);

// Largest violation of the lasso optimality conditions: |g_j| - lambda on zero
// coordinates, |g_j - lambda sign(beta_j)| elsewhere, with g = X'(y - X beta)/n.
double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                     double lambda);

// ||X'y||_inf / n, the smallest lambda with an all-zero solution.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Cyclic coordinate descent on (1/2n)||y - X beta||^2 + lambda ||beta||_1.
// Non-convergence is reported through LassoFit::converged, not thrown.
LassoFit fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SolverConfig& config);

// Same problem and sweep rule as fit_lasso, with X'X/n and X'y/n precomputed
// so that each coordinate update costs O(p) instead of O(n). Meant for many
// fits on the same data (lambda paths); results agree with fit_lasso to the
// solver tolerance, not bitwise.
class GramProblem {
 public:
  GramProblem(Eigen::MatrixXd X, Eigen::VectorXd y);

  LassoFit fit(const SolverConfig& config) const;

  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& xty() const { return xty_; }

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd xty_;
};

// fit_lasso on the AR(1)-whitened problem (R X, R y).
LassoFit fit_gls_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double rho, const SolverConfig& config);

struct FglsFit {
  LassoFit fit;     // second stage
  LassoFit stage1;  // plain lasso used for the residuals
  ArFitResult ar;
};

// Below this multiple of n the lagged residual energy is treated as zero and
// the second stage falls back to rho = 0.
inline constexpr double kDegenerateLagEnergy = 1e-12;

// AR(1) estimate from residuals, with rho_used = 0 when the lag energy is
// below kDegenerateLagEnergy * n.
ArFitResult estimate_ar1_or_identity(const Eigen::VectorXd& residuals);

// Lasso, AR(1) estimate from its residuals, then GLS lasso with the estimate.
FglsFit fit_fgls_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SolverConfig& stage1,
                       const SolverConfig& stage2);

}  // namespace whitelasso
