#include "whitelasso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace whitelasso {

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be positive");
}

std::string estimator_name(EstimatorKind::Type type) {
  switch (type) {
    case EstimatorKind::Type::Lasso: return "lasso";
    case EstimatorKind::Type::GlsKnownRho: return "gls";
    case EstimatorKind::Type::Fgls: return "fgls";
  }
  return "unknown";
}

std::string EstimatorKind::name() const { return estimator_name(type); }

EstimatorKind::Type parse_estimator(const std::string& name) {
  if (name == "lasso") return EstimatorKind::Type::Lasso;
  if (name == "gls") return EstimatorKind::Type::GlsKnownRho;
  if (name == "fgls") return EstimatorKind::Type::Fgls;
  throw std::invalid_argument("unknown estimator '" + name + "' (expected lasso, gls or fgls)");
}

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                       double lambda) {
  const double n = static_cast<double>(X.rows());
  return (y - X * beta).squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
}

double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                     double lambda) {
  const double n = static_cast<double>(X.rows());
  const Eigen::VectorXd grad = X.transpose() * (y - X * beta) / n;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double v = beta(j) == 0.0 ? std::max(0.0, std::abs(grad(j)) - lambda)
                                    : std::abs(grad(j) - std::copysign(lambda, beta(j)));
    worst = std::max(worst, v);
  }
  return worst;
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.cols() == 0) return 0.0;
  return (X.transpose() * y).lpNorm<Eigen::Infinity>() / static_cast<double>(X.rows());
}

namespace {

void check_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("fit: X must have at least one row and column");
  if (X.rows() != y.size()) throw std::invalid_argument("fit: X and y have different numbers of rows");
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("fit: non-finite input");
}

// Shared sweep logic. The backend supplies coordinate updates on either the
// residual (O(n) per update) or the gradient X'r/n via the Gram matrix (O(p)).
template <class Backend>
LassoFit coordinate_descent(Backend& be, const SolverConfig& config) {
  const Eigen::Index p = be.dim();
  const double kkt_limit = 10.0 * config.tol * std::max(1.0, be.max_col_sq());

  LassoFit fit;
  int full_sweeps = 0;
  std::vector<Eigen::Index> active;
  active.reserve(static_cast<std::size_t>(p));
  while (fit.sweeps < config.max_sweeps) {
    double change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) change = std::max(change, be.update(j));
    ++fit.sweeps;
    ++full_sweeps;
    if (config.on_sweep) config.on_sweep(full_sweeps, be.objective());
    if (change < config.tol && be.kkt() <= kkt_limit) {
      fit.converged = true;
      break;
    }

    active.clear();
    for (Eigen::Index j = 0; j < p; ++j)
      if (be.beta(j) != 0.0) active.push_back(j);
    if (active.empty()) continue;
    be.enter_active(active);
    const auto m = static_cast<Eigen::Index>(active.size());
    while (fit.sweeps < config.max_sweeps) {
      change = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) change = std::max(change, be.update_active(k));
      ++fit.sweeps;
      if (change < config.tol) break;
    }
    be.leave_active();
  }
  return fit;
}

class ResidualBackend {
 public:
  ResidualBackend(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, Eigen::VectorXd beta)
      : X_(X), y_(y), lambda_(lambda), inv_n_(1.0 / static_cast<double>(X.rows())), beta_(std::move(beta)) {
    col_sq_.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      col_sq_(j) = X.col(j).squaredNorm() * inv_n_;
      if (col_sq_(j) == 0.0) beta_(j) = 0.0;
    }
    r_ = y - X * beta_;
  }

  Eigen::Index dim() const { return X_.cols(); }
  double max_col_sq() const { return col_sq_.maxCoeff(); }
  double beta(Eigen::Index j) const { return beta_(j); }

  double update(Eigen::Index j) {
    if (col_sq_(j) == 0.0) return 0.0;
    const double old = beta_(j);
    const double z = old * col_sq_(j) + X_.col(j).dot(r_) * inv_n_;
    const double next = soft_threshold(z, lambda_) / col_sq_(j);
    if (next == old) return 0.0;
    r_.noalias() -= (next - old) * X_.col(j);
    beta_(j) = next;
    return std::abs(next - old);
  }

  void enter_active(const std::vector<Eigen::Index>& active) { active_ = &active; }
  double update_active(Eigen::Index k) { return update((*active_)[static_cast<std::size_t>(k)]); }
  void leave_active() { active_ = nullptr; }

  double objective() const { return lasso_objective(X_, y_, beta_, lambda_); }
  double kkt() const { return kkt_violation(X_, y_, beta_, lambda_); }
  Eigen::VectorXd take_beta() { return std::move(beta_); }

 private:
  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& y_;
  double lambda_;
  double inv_n_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd col_sq_;
  Eigen::VectorXd r_;
  const std::vector<Eigen::Index>* active_ = nullptr;
};

class GramBackend {
 public:
  GramBackend(const GramProblem& prob, double lambda, Eigen::VectorXd beta)
      : prob_(prob), lambda_(lambda), beta_(std::move(beta)) {
    const Eigen::VectorXd& d = prob.gram().diagonal();
    for (Eigen::Index j = 0; j < beta_.size(); ++j)
      if (d(j) == 0.0) beta_(j) = 0.0;
    refresh();
  }

  Eigen::Index dim() const { return beta_.size(); }
  double max_col_sq() const { return prob_.gram().diagonal().maxCoeff(); }
  double beta(Eigen::Index j) const { return beta_(j); }

  double update(Eigen::Index j) {
    const double d = prob_.gram()(j, j);
    if (d == 0.0) return 0.0;
    const double old = beta_(j);
    const double next = soft_threshold(old * d + grad_(j), lambda_) / d;
    if (next == old) return 0.0;
    grad_.noalias() -= (next - old) * prob_.gram().col(j);
    beta_(j) = next;
    return std::abs(next - old);
  }

  // Active passes work on a compacted copy of G restricted to the active set,
  // so one pass costs |A|^2; the full gradient is rebuilt on leaving.
  void enter_active(const std::vector<Eigen::Index>& active) {
    const auto m = static_cast<Eigen::Index>(active.size());
    idx_ = &active;
    sub_gram_.resize(m, m);
    sub_grad_.resize(m);
    sub_beta_.resize(m);
    for (Eigen::Index b = 0; b < m; ++b) {
      const Eigen::Index jb = active[static_cast<std::size_t>(b)];
      for (Eigen::Index a = 0; a < m; ++a) sub_gram_(a, b) = prob_.gram()(active[static_cast<std::size_t>(a)], jb);
      sub_grad_(b) = grad_(jb);
      sub_beta_(b) = beta_(jb);
    }
  }

  double update_active(Eigen::Index k) {
    const double d = sub_gram_(k, k);
    const double old = sub_beta_(k);
    const double next = soft_threshold(old * d + sub_grad_(k), lambda_) / d;
    if (next == old) return 0.0;
    sub_grad_.noalias() -= (next - old) * sub_gram_.col(k);
    sub_beta_(k) = next;
    return std::abs(next - old);
  }

  void leave_active() {
    for (std::size_t k = 0; k < idx_->size(); ++k) beta_((*idx_)[k]) = sub_beta_(static_cast<Eigen::Index>(k));
    idx_ = nullptr;
    refresh();
  }

  double objective() const { return lasso_objective(prob_.X(), prob_.y(), beta_, lambda_); }

  // Also resets the running gradient, which drifts with many rank-one updates.
  double kkt() {
    refresh();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta_.size(); ++j) {
      const double v = beta_(j) == 0.0 ? std::max(0.0, std::abs(grad_(j)) - lambda_)
                                       : std::abs(grad_(j) - std::copysign(lambda_, beta_(j)));
      worst = std::max(worst, v);
    }
    return worst;
  }

  Eigen::VectorXd take_beta() { return std::move(beta_); }

 private:
  void refresh() { grad_ = prob_.xty() - prob_.gram() * beta_; }

  const GramProblem& prob_;
  double lambda_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd grad_;
  const std::vector<Eigen::Index>* idx_ = nullptr;
  Eigen::MatrixXd sub_gram_;
  Eigen::VectorXd sub_grad_;
  Eigen::VectorXd sub_beta_;
};

Eigen::VectorXd start_vector(const SolverConfig& config, Eigen::Index p) {
  if (!config.warm_start) return Eigen::VectorXd::Zero(p);
  if (config.warm_start->size() != p) throw std::invalid_argument("fit: warm start has the wrong length");
  if (!config.warm_start->allFinite()) throw std::invalid_argument("fit: non-finite warm start");
  return *config.warm_start;
}

template <class Backend>
LassoFit finish(Backend& be, LassoFit fit, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
  fit.beta = be.take_beta();
  fit.objective = lasso_objective(X, y, fit.beta, lambda);
  fit.kkt_violation = kkt_violation(X, y, fit.beta, lambda);
  return fit;
}

LassoFit solve_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SolverConfig& config,
                        Eigen::VectorXd start) {
  ResidualBackend be(X, y, config.lambda, std::move(start));
  LassoFit fit = coordinate_descent(be, config);
  return finish(be, std::move(fit), X, y, config.lambda);
}

}  // namespace

LassoFit fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SolverConfig& config) {
  config.validate();
  check_inputs(X, y);
  const Eigen::Index p = X.cols();
  Eigen::VectorXd start = start_vector(config, p);
  if (!config.standardize) return solve_residual(X, y, config, std::move(start));

  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double s = std::sqrt(X.col(j).squaredNorm() / n);
    scale(j) = s > 0.0 ? s : 1.0;
  }
  const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
  LassoFit fit = solve_residual(Xs, y, config, start.cwiseProduct(scale));
  fit.beta = fit.beta.cwiseQuotient(scale);
  fit.objective = lasso_objective(X, y, fit.beta, config.lambda);
  return fit;
}

GramProblem::GramProblem(Eigen::MatrixXd X, Eigen::VectorXd y) : X_(std::move(X)), y_(std::move(y)) {
  check_inputs(X_, y_);
  const double inv_n = 1.0 / static_cast<double>(X_.rows());
  gram_ = X_.transpose() * X_ * inv_n;
  xty_ = X_.transpose() * y_ * inv_n;
}

LassoFit GramProblem::fit(const SolverConfig& config) const {
  config.validate();
  if (config.standardize) throw std::invalid_argument("GramProblem::fit: standardization is not supported");
  GramBackend be(*this, config.lambda, start_vector(config, X_.cols()));
  LassoFit fit = coordinate_descent(be, config);
  return finish(be, std::move(fit), X_, y_, config.lambda);
}

LassoFit fit_gls_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double rho, const SolverConfig& config) {
  const WhiteningOperator r = build_whitener(rho);
  return fit_lasso(r.apply(X), r.apply(y), config);
}

ArFitResult estimate_ar1_or_identity(const Eigen::VectorXd& residuals) {
  const Eigen::Index n = residuals.size();
  if (n < 2) throw std::invalid_argument("estimate_ar1: need at least two residuals");
  if (lag_sum_of_squares(residuals) < kDegenerateLagEnergy * static_cast<double>(n)) {
    ArFitResult ar;
    ar.n_terms = static_cast<int>(n - 1);
    ar.degenerate = true;
    return ar;
  }
  return estimate_ar1(residuals);
}

FglsFit fit_fgls_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SolverConfig& stage1,
                       const SolverConfig& stage2) {
  if (X.rows() < 2) throw std::invalid_argument("fit_fgls_lasso: need n >= 2");
  FglsFit out;
  out.stage1 = fit_lasso(X, y, stage1);
  out.ar = estimate_ar1_or_identity(residuals(y, X, out.stage1.beta));
  out.fit = fit_gls_lasso(X, y, out.ar.rho_used, stage2);
  return out;
}

}  // namespace whitelasso
