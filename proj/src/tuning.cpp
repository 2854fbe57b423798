#include "whitelasso/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "whitelasso/errors.hpp"

namespace whitelasso {

void TheoryConstants::check_evaluable() const {
  if (!(K > 0.0)) throw std::invalid_argument("theory constant K must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("theory constant c must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(C_prop3 > 0.0)) throw std::invalid_argument("constant C must be positive");
}

void TheoryConstants::validate() const {
  check_evaluable();
  if (!(tau > 1.0)) throw std::invalid_argument("tau must exceed 1");
}

double prop3_constant(double c, double kappa, double sigma_u) {
  if (!(c > 0.0) || !(kappa > 0.0) || !(sigma_u > 0.0))
    throw std::invalid_argument("prop3_constant: c, kappa and sigma_u must be positive");
  return std::sqrt(30.0) * 8.0 / std::sqrt(c * kappa * sigma_u * sigma_u);
}

double delta_scaling_log(double n, double log_r) {
  if (!(n > 0.0)) throw std::invalid_argument("delta_scaling: n must be positive");
  if (!(log_r > 0.0)) throw std::invalid_argument("delta_scaling: r must exceed 1");
  return std::sqrt(log_r / n);
}

double delta_scaling(double n, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("delta_scaling: r must exceed 1");
  return delta_scaling_log(n, std::log(r));
}

namespace {

void check_rho(double rho) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("rho must lie in (-1,1)");
}

double log_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  return std::log(p);
}

}  // namespace

double lambda_lasso_theoretical(const TheoryConstants& consts, double n, double p, double rho) {
  consts.check_evaluable();
  check_rho(rho);
  const double inv_a2 = 1.0 - rho * rho;
  return 4.0 * consts.K / std::sqrt(consts.c) * delta_scaling_log(inv_a2 * n, consts.tau * log_p(p));
}

double fgls_inflation(const TheoryConstants& consts, double n, double p, int s, double rho) {
  consts.check_evaluable();
  check_rho(rho);
  if (s < 1) throw std::invalid_argument("s must be at least 1");
  const double inv_a2 = 1.0 - rho * rho;
  const double d = delta_scaling_log(inv_a2 * n, s * consts.tau * log_p(p));
  return std::sqrt(1.0 + rho * rho * consts.C_prop3 * d);
}

double lambda_fgls_theoretical(const TheoryConstants& consts, double n, double p, int s, double rho) {
  return 4.0 / std::sqrt(consts.c) * fgls_inflation(consts, n, p, s, rho) *
         delta_scaling_log(n, consts.tau * log_p(p));
}

std::vector<double> default_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int length) {
  if (length < 2) throw std::invalid_argument("default_grid: length must be at least 2");
  const double top = lambda_max(X, y);
  if (!(top > 0.0)) throw DegenerateInput("default_grid: lambda_max is zero (y is orthogonal to every column)");
  std::vector<double> grid(static_cast<std::size_t>(length));
  const double log_ratio = std::log(1e-3);
  for (int i = 0; i < length; ++i) grid[i] = top * std::exp(log_ratio * i / (length - 1));
  grid.front() = top;
  return grid;
}

namespace {

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
  for (double v : grid)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("lambda grid values must be positive and finite");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("lambda grid values must be distinct");
}

// Positions of grid sorted by decreasing lambda.
std::vector<std::size_t> decreasing_order(const std::vector<double>& grid) {
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });
  return order;
}

// Index into `values` (visited in `order`, largest lambda first) of the
// smallest value; the first minimum wins, which is the larger lambda.
std::size_t argmin_prefer_large(const std::vector<double>& values, const std::vector<std::size_t>& order) {
  std::size_t best = order.front();
  for (std::size_t k : order)
    if (values[k] < values[best]) best = k;
  return best;
}

// Repeated fits on one data set: Gram backend unless standardization is on.
class PathFitter {
 public:
  PathFitter(Eigen::MatrixXd X, Eigen::VectorXd y, const SolverConfig& base) {
    if (base.standardize) {
      X_ = std::move(X);
      y_ = std::move(y);
    } else {
      gram_.emplace(std::move(X), std::move(y));
    }
  }
  LassoFit fit(const SolverConfig& cfg) const { return gram_ ? gram_->fit(cfg) : fit_lasso(X_, y_, cfg); }

 private:
  std::optional<GramProblem> gram_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
};

struct Rows {
  Eigen::Index begin;
  Eigen::Index count;
};

// Lasso path over `order` on the training rows, scored on the validation rows.
void score_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Rows train, Rows valid,
                const std::vector<double>& grid, const std::vector<std::size_t>& order, const SolverConfig& base,
                std::vector<double>& mse_sum) {
  const PathFitter path(X.middleRows(train.begin, train.count), y.segment(train.begin, train.count), base);
  SolverConfig cfg = base;
  cfg.warm_start = Eigen::VectorXd::Zero(X.cols());
  for (std::size_t k : order) {
    cfg.lambda = grid[k];
    LassoFit fit = path.fit(cfg);
    const Eigen::VectorXd err =
        y.segment(valid.begin, valid.count) - X.middleRows(valid.begin, valid.count) * fit.beta;
    mse_sum[k] += err.squaredNorm() / static_cast<double>(valid.count);
    cfg.warm_start = std::move(fit.beta);
  }
}

// FGLS path: per lambda, rho from the training-half lasso residuals, then the
// second stage on the whitened full series restricted to the training half.
void score_fgls_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Rows train, Rows valid,
                     const std::vector<double>& grid, const std::vector<std::size_t>& order,
                     const SolverConfig& base, std::vector<double>& mse_sum) {
  const Eigen::MatrixXd Xt = X.middleRows(train.begin, train.count);
  const Eigen::VectorXd yt = y.segment(train.begin, train.count);
  const PathFitter path(Xt, yt, base);
  SolverConfig first = base;
  SolverConfig second = base;
  first.warm_start = Eigen::VectorXd::Zero(X.cols());
  second.warm_start = Eigen::VectorXd::Zero(X.cols());
  for (std::size_t k : order) {
    first.lambda = second.lambda = grid[k];
    LassoFit stage1 = path.fit(first);
    const ArFitResult ar = estimate_ar1_or_identity(residuals(yt, Xt, stage1.beta));
    first.warm_start = std::move(stage1.beta);

    const WhiteningOperator r = build_whitener(ar.rho_used);
    const Eigen::MatrixXd Xw = r.apply(X);
    const Eigen::VectorXd yw = r.apply(y);
    LassoFit fit = fit_lasso(Xw.middleRows(train.begin, train.count), yw.segment(train.begin, train.count), second);
    const Eigen::VectorXd err =
        yw.segment(valid.begin, valid.count) - Xw.middleRows(valid.begin, valid.count) * fit.beta;
    mse_sum[k] += err.squaredNorm() / static_cast<double>(valid.count);
    second.warm_start = std::move(fit.beta);
  }
}

}  // namespace

CvResult cv_two_fold(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const EstimatorKind& estimator,
                     const std::vector<double>& grid, const SolverConfig& base) {
  const Eigen::Index n = X.rows();
  if (n < 4) throw std::invalid_argument("cv_two_fold: need n >= 4");
  if (y.size() != n) throw std::invalid_argument("cv_two_fold: X and y have different numbers of rows");
  validate_grid(grid);

  const Rows first{0, n / 2};
  const Rows second{n / 2, n - n / 2};
  const auto order = decreasing_order(grid);
  std::vector<double> mse(grid.size(), 0.0);

  switch (estimator.type) {
    case EstimatorKind::Type::Lasso:
      score_path(X, y, first, second, grid, order, base, mse);
      score_path(X, y, second, first, grid, order, base, mse);
      break;
    case EstimatorKind::Type::GlsKnownRho: {
      const WhiteningOperator r = build_whitener(estimator.rho);
      const Eigen::MatrixXd Xw = r.apply(X);
      const Eigen::VectorXd yw = r.apply(y);
      score_path(Xw, yw, first, second, grid, order, base, mse);
      score_path(Xw, yw, second, first, grid, order, base, mse);
      break;
    }
    case EstimatorKind::Type::Fgls:
      score_fgls_path(X, y, first, second, grid, order, base, mse);
      score_fgls_path(X, y, second, first, grid, order, base, mse);
      break;
  }
  for (double& v : mse) v *= 0.5;

  CvResult out;
  out.lambda_grid = grid;
  out.validation_mse = std::move(mse);
  const std::size_t best = argmin_prefer_large(out.validation_mse, order);
  out.chosen_index = static_cast<int>(best);
  out.chosen_lambda = grid[best];
  return out;
}

double oracle_holdout_lambda(const SimulatedDataset& train, const SimulatedDataset& holdout,
                             const std::vector<double>& grid, const SolverConfig& base) {
  if (train.X.cols() != holdout.X.cols())
    throw std::invalid_argument("oracle_holdout_lambda: datasets have different p");
  if (train.beta0 != holdout.beta0) throw std::invalid_argument("oracle_holdout_lambda: datasets have different beta0");
  validate_grid(grid);
  const auto order = decreasing_order(grid);
  std::vector<double> err(grid.size(), 0.0);
  const PathFitter path(holdout.X, holdout.y, base);
  SolverConfig cfg = base;
  cfg.warm_start = Eigen::VectorXd::Zero(holdout.X.cols());
  for (std::size_t k : order) {
    cfg.lambda = grid[k];
    LassoFit fit = path.fit(cfg);
    err[k] = (fit.beta - holdout.beta0).norm();
    cfg.warm_start = std::move(fit.beta);
  }
  return grid[argmin_prefer_large(err, order)];
}

void TuningOptions::validate() const {
  if (mode == TuningMode::Fixed && (!(lambda >= 0.0) || !std::isfinite(lambda)))
    throw std::invalid_argument("fixed lambda must be finite and >= 0");
  if (mode == TuningMode::CrossValidation && grid_length < 2)
    throw std::invalid_argument("grid length must be at least 2");
  if (mode == TuningMode::Theory) {
    theory.validate();
    if (theory_s < 1) throw std::invalid_argument("theory sparsity must be at least 1");
  }
}

namespace {

// Lasso on (X, y) tuned per options; `theory_lambda` is used in Theory mode.
TunedFit tune_and_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TuningOptions& options,
                      double theory_lambda) {
  TunedFit out;
  SolverConfig cfg = options.solver;
  cfg.warm_start.reset();
  switch (options.mode) {
    case TuningMode::Fixed: out.lambda = options.lambda; break;
    case TuningMode::Theory: out.lambda = theory_lambda; break;
    case TuningMode::CrossValidation: {
      const auto grid = default_grid(X, y, options.grid_length);
      out.cv = cv_two_fold(X, y, EstimatorKind::lasso(), grid, cfg);
      out.lambda = out.cv->chosen_lambda;
      break;
    }
  }
  cfg.lambda = out.lambda;
  out.fit = fit_lasso(X, y, cfg);
  return out;
}

}  // namespace

TunedFit fit_tuned(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const EstimatorKind& estimator,
                   const TuningOptions& options, const TunedFit* stage1) {
  options.validate();
  const double n = static_cast<double>(X.rows());
  const double p = static_cast<double>(X.cols());
  auto theory = [&](double rho) {
    return options.mode == TuningMode::Theory ? lambda_lasso_theoretical(options.theory, n, p, rho) : 0.0;
  };

  switch (estimator.type) {
    case EstimatorKind::Type::Lasso:
      return tune_and_fit(X, y, options, theory(options.theory_rho));

    case EstimatorKind::Type::GlsKnownRho: {
      // Whitening and then cross-validating is the same as cv_two_fold with
      // GlsKnownRho; the grid is built from the whitened data.
      const WhiteningOperator r = build_whitener(estimator.rho);
      return tune_and_fit(r.apply(X), r.apply(y), options, theory(0.0));
    }

    case EstimatorKind::Type::Fgls: {
      TunedFit first = stage1 ? *stage1 : tune_and_fit(X, y, options, theory(options.theory_rho));
      const ArFitResult ar = estimate_ar1_or_identity(residuals(y, X, first.fit.beta));
      const WhiteningOperator r = build_whitener(ar.rho_used);
      const double second_theory =
          options.mode == TuningMode::Theory
              ? lambda_fgls_theoretical(options.theory, n, p, options.theory_s, ar.rho_used)
              : 0.0;
      TunedFit out = tune_and_fit(r.apply(X), r.apply(y), options, second_theory);
      out.ar = ar;
      out.stage1_lambda = first.lambda;
      return out;
    }
  }
  throw std::logic_error("fit_tuned: unknown estimator");
}

}  // namespace whitelasso
