#include "whitelasso/whiten.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "whitelasso/errors.hpp"

namespace whitelasso {

WhiteningOperator build_whitener(double rho) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("rho must lie in (-1,1), got " + std::to_string(rho));
  return WhiteningOperator(rho, std::sqrt(1.0 - rho * rho));
}

Eigen::VectorXd WhiteningOperator::apply(const Eigen::VectorXd& v) const {
  if (rho_ == 0.0) return v;
  const Eigen::Index n = v.size();
  Eigen::VectorXd out(n);
  if (n == 0) return out;
  out(0) = first_scale_ * v(0);
  for (Eigen::Index t = 1; t < n; ++t) out(t) = v(t) - rho_ * v(t - 1);
  return out;
}

Eigen::MatrixXd WhiteningOperator::apply(const Eigen::MatrixXd& m) const {
  if (rho_ == 0.0) return m;
  Eigen::MatrixXd out(m.rows(), m.cols());
  const Eigen::Index n = m.rows();
  if (n == 0) return out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out(0, j) = first_scale_ * m(0, j);
    for (Eigen::Index t = 1; t < n; ++t) out(t, j) = m(t, j) - rho_ * m(t - 1, j);
  }
  return out;
}

Eigen::MatrixXd WhiteningOperator::dense(int n) const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  if (n == 0) return r;
  r(0, 0) = first_scale_;
  for (int t = 1; t < n; ++t) r(t, t - 1) = -rho_;
  return r;
}

Eigen::MatrixXd ar1_cholesky_dense(double rho, int n) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("rho must lie in (-1,1)");
  const double a = 1.0 / std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < n; ++t) {
    psi(t, 0) = a * std::pow(rho, t);
    for (int k = 1; k <= t; ++k) psi(t, k) = std::pow(rho, t - k);
  }
  return psi;
}

double lag_sum_of_squares(const Eigen::VectorXd& residuals) {
  const Eigen::Index n = residuals.size();
  return n < 2 ? 0.0 : residuals.head(n - 1).squaredNorm();
}

ArFitResult estimate_ar1(const Eigen::VectorXd& residuals) {
  const Eigen::Index n = residuals.size();
  if (n < 2) throw std::invalid_argument("estimate_ar1: need at least two residuals");
  const double den = lag_sum_of_squares(residuals);
  if (!(den > 0.0)) throw DegenerateInput("estimate_ar1: lagged residuals are all zero");
  const double num = residuals.head(n - 1).dot(residuals.tail(n - 1));

  ArFitResult fit;
  fit.rho_raw = num / den;
  fit.n_terms = static_cast<int>(n - 1);
  fit.clamped = std::abs(fit.rho_raw) > kRhoCap;
  fit.rho_used = fit.clamped ? std::copysign(kRhoCap, fit.rho_raw) : fit.rho_raw;
  return fit;
}

Eigen::VectorXd residuals(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  if (X.rows() != y.size() || X.cols() != beta.size())
    throw std::invalid_argument("residuals: shape mismatch (X is " + std::to_string(X.rows()) + "x" +
                                std::to_string(X.cols()) + ", y has " + std::to_string(y.size()) +
                                ", beta has " + std::to_string(beta.size()) + ")");
  return y - X * beta;
}

}  // namespace whitelasso
