#pragma once

#include <Eigen/Dense>

namespace whitelasso {

// Inverse of the AR(1) Cholesky factor: a causal filter with first row scaled
// by sqrt(1 - rho^2) and out_t = v_t - rho * v_{t-1} afterwards.
class WhiteningOperator {
 public:
  double rho() const { return rho_; }
  double first_scale() const { return first_scale_; }

  // O(n).
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  // Filters every column independently.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;

  // n x n lower-bidiagonal matrix.
  Eigen::MatrixXd dense(int n) const;

 private:
  friend WhiteningOperator build_whitener(double rho);
  WhiteningOperator(double rho, double first_scale) : rho_(rho), first_scale_(first_scale) {}

  double rho_;
  double first_scale_;
};

// Throws std::invalid_argument unless |rho| < 1.
WhiteningOperator build_whitener(double rho);

// Dense AR(1) Cholesky factor Psi0 (unit innovation variance): column 0 holds
// a * rho^t, column k > 0 holds rho^(t-k) on and below the diagonal.
Eigen::MatrixXd ar1_cholesky_dense(double rho, int n);

inline constexpr double kRhoCap = 0.999;

struct ArFitResult {
  double rho_raw = 0.0;   // least-squares lag-1 coefficient
  double rho_used = 0.0;  // rho_raw clamped to +-kRhoCap
  int n_terms = 0;        // n - 1
  bool clamped = false;
  bool degenerate = false;  // set by callers that fell back to rho_used = 0
};

// sum_{t>=2} e_{t-1} e_t / sum_{t>=2} e_{t-1}^2. Throws std::invalid_argument
// for n < 2 and DegenerateInput when the denominator is zero.
ArFitResult estimate_ar1(const Eigen::VectorXd& residuals);

// sum_{t>=2} e_{t-1}^2, the denominator used by estimate_ar1.
double lag_sum_of_squares(const Eigen::VectorXd& residuals);

// y - X * beta.
Eigen::VectorXd residuals(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

}  // namespace whitelasso
