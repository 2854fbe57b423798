#include "whitelasso/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "whitelasso/whiten.hpp"

namespace whitelasso {

namespace {

void check_lengths(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("coefficient vectors have different lengths");
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

ErrorReport estimation_errors(const Eigen::VectorXd& beta_est, const Eigen::VectorXd& beta0) {
  check_lengths(beta_est, beta0);
  const Eigen::VectorXd diff = beta_est - beta0;
  ErrorReport r;
  if (diff.size() == 0) return r;
  r.l1 = diff.lpNorm<1>();
  r.l2 = diff.norm();
  r.linf = diff.lpNorm<Eigen::Infinity>();
  r.l2_scaled = r.l2 / std::sqrt(static_cast<double>(diff.size()));
  return r;
}

bool sign_recovered(const Eigen::VectorXd& beta_est, const Eigen::VectorXd& beta0) {
  check_lengths(beta_est, beta0);
  for (Eigen::Index i = 0; i < beta0.size(); ++i)
    if (sign_of(beta_est(i)) != sign_of(beta0(i))) return false;
  return true;
}

std::vector<double> psi_frobenius_growth(int n, double rho, double sigma_u, const InitMode& init) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("rho must lie in (-1,1)");
  if (!(sigma_u > 0.0)) throw std::invalid_argument("sigma_u must be positive");
  if (n < 1) throw std::invalid_argument("n must be positive");
  const double s2 = sigma_u * sigma_u;
  std::vector<double> out(static_cast<std::size_t>(n));
  if (init.kind == InitMode::Kind::Stationary) {
    // Every term equals the stationary variance; multiply rather than
    // accumulate so F_n = n a^2 sigma_u^2 holds to rounding.
    const double v = s2 / (1.0 - rho * rho);
    for (int t = 0; t < n; ++t) out[t] = (t + 1) * v;
    return out;
  }
  double var = init.first_variance(rho, sigma_u);
  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    if (t > 0) var = rho * rho * var + s2;
    total += var;
    out[t] = total;
  }
  return out;
}

ReProbe re_cone_probe(const Eigen::MatrixXd& X, const std::vector<int>& support, double alpha, int num_samples,
                      Rng& rng) {
  if (support.empty()) throw std::invalid_argument("re_cone_probe: support must be nonempty");
  if (!(alpha > 0.0)) throw std::invalid_argument("re_cone_probe: alpha must be positive");
  if (num_samples < 1) throw std::invalid_argument("re_cone_probe: num_samples must be positive");
  const Eigen::Index p = X.cols();
  std::vector<bool> in_support(static_cast<std::size_t>(p), false);
  for (int j : support) {
    if (j < 0 || j >= p) throw std::invalid_argument("re_cone_probe: support index out of range");
    if (in_support[j]) throw std::invalid_argument("re_cone_probe: duplicate support index");
    in_support[j] = true;
  }
  std::vector<int> off;
  for (int j = 0; j < p; ++j)
    if (!in_support[j]) off.push_back(j);

  ReProbe probe;
  probe.alpha = alpha;
  probe.support = support;
  probe.num_samples = num_samples;
  probe.min_ratio = std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd v(p);
  for (int k = 0; k < num_samples; ++k) {
    v.setZero();
    double on_l1 = 0.0;
    for (int j : support) {
      v(j) = rng.normal();
      on_l1 += std::abs(v(j));
    }
    double off_l1 = 0.0;
    for (int j : off) {
      v(j) = rng.normal();
      off_l1 += std::abs(v(j));
    }
    const double budget = alpha * rng.uniform() * on_l1;
    const double scale = off_l1 > 0.0 ? budget / off_l1 : 0.0;
    for (int j : off) v(j) *= scale;
    const double denom = n * v.squaredNorm();
    if (denom == 0.0) continue;
    probe.min_ratio = std::min(probe.min_ratio, (X * v).squaredNorm() / denom);
  }
  if (!std::isfinite(probe.min_ratio)) probe.min_ratio = 0.0;
  return probe;
}

std::string bound_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::Prop1Lasso: return "prop1_lasso";
    case BoundKind::Thm1Oracle: return "thm1_oracle";
    case BoundKind::Prop3ArRelError: return "prop3_ar_rel_error";
    case BoundKind::Cor3Fgls: return "cor3_fgls";
  }
  return "unknown";
}

double BoundReport::input(const std::string& key) const {
  for (const auto& [k, v] : inputs)
    if (k == key) return v;
  throw std::out_of_range("BoundReport: no input named " + key);
}

namespace {

double log_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  return std::log(p);
}

void check_rho(double rho) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("rho must lie in (-1,1)");
}

BoundReport vacuous(BoundReport r) {
  r.vacuous = true;
  r.value = std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace

BoundReport bound_prop1(const TheoryConstants& consts, double kappa, double n, double p, int s, double rho) {
  consts.check_evaluable();
  check_rho(rho);
  if (s < 1) throw std::invalid_argument("s must be at least 1");
  BoundReport r{BoundKind::Prop1Lasso,
                {{"K", consts.K}, {"c", consts.c}, {"tau", consts.tau}, {"kappa", kappa}, {"n", n}, {"p", p},
                 {"s", static_cast<double>(s)}, {"rho", rho}},
                0.0,
                false};
  if (!(kappa > 0.0)) return vacuous(std::move(r));
  const double d = delta_scaling_log((1.0 - rho * rho) * n, s * consts.tau * log_p(p));
  r.value = 12.0 * consts.K / (std::sqrt(consts.c) * kappa) * d;
  return r;
}

BoundReport bound_thm1(double lambda_t, double kappa_t, int s_size, double tail_l1, double sigma_max, double n,
                       double p) {
  if (!(lambda_t > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (s_size < 0) throw std::invalid_argument("|S| must be non-negative");
  if (!(tail_l1 >= 0.0)) throw std::invalid_argument("tail l1 mass must be non-negative");
  if (!(sigma_max > 0.0)) throw std::invalid_argument("sigma_max must be positive");
  BoundReport r{BoundKind::Thm1Oracle,
                {{"lambda", lambda_t}, {"kappa", kappa_t}, {"s_size", static_cast<double>(s_size)},
                 {"tail_l1", tail_l1}, {"sigma_max", sigma_max}, {"n", n}, {"p", p}},
                0.0,
                false};
  if (!(kappa_t > 0.0)) return vacuous(std::move(r));
  const double d2 = log_p(p) / n;
  r.value = 27.0 * s_size * lambda_t * lambda_t / (8.0 * kappa_t * kappa_t) + lambda_t * tail_l1 / kappa_t +
            144.0 / kappa_t * sigma_max * sigma_max * d2 * tail_l1 * tail_l1;
  return r;
}

BoundReport bound_prop3(const TheoryConstants& consts, double n, double p, int s) {
  consts.check_evaluable();
  if (s < 1) throw std::invalid_argument("s must be at least 1");
  BoundReport r{BoundKind::Prop3ArRelError,
                {{"C", consts.C_prop3}, {"tau", consts.tau}, {"n", n}, {"p", p}, {"s", static_cast<double>(s)}},
                0.0,
                false};
  r.value = consts.C_prop3 * delta_scaling_log(n, s * consts.tau * log_p(p));
  return r;
}

BoundReport bound_cor3(const TheoryConstants& consts, double eta_min, double n, double p, int s, double rho) {
  consts.check_evaluable();
  check_rho(rho);
  if (s < 1) throw std::invalid_argument("s must be at least 1");
  if (!(eta_min > 0.0)) throw std::invalid_argument("eta_min must be positive");
  BoundReport r{BoundKind::Cor3Fgls,
                {{"c", consts.c}, {"tau", consts.tau}, {"C", consts.C_prop3}, {"eta_min", eta_min}, {"n", n},
                 {"p", p}, {"s", static_cast<double>(s)}, {"rho", rho}},
                0.0,
                false};
  const double lp = s * consts.tau * log_p(p);
  const double inflation = 1.0 + rho * rho / (1.0 - rho * rho) * consts.C_prop3 * std::sqrt(lp / n);
  r.value = 128.0 / (std::sqrt(consts.c) * eta_min * eta_min) * std::sqrt(2.0 / 3.0) * inflation *
            delta_scaling_log(n, lp);
  return r;
}

double kappa_lasso(double eta_min, double sigma_max, double n, double p, double alpha, int s) {
  return eta_min * eta_min / 4.0 - 9.0 * sigma_max * sigma_max * (log_p(p) / n) * (1.0 + alpha) * (1.0 + alpha) * s;
}

double whitener_gamma(double rho, int n) {
  check_rho(rho);
  if (n < 1) throw std::invalid_argument("n must be positive");
  // ||R||_F^2 = (1 - rho^2) + (n - 1)(1 + rho^2).
  const double frob2 = (1.0 - rho * rho) + (n - 1) * (1.0 + rho * rho);
  return frob2 / (2.0 * n);
}

double kappa_gls(double eta_min, double rho, int n) {
  const double g = whitener_gamma(rho, n);
  return (1.0 + g) * (1.0 + g) * eta_min * eta_min / 32.0;
}

double whitener_spectral_norm(double rho, int n) {
  const Eigen::MatrixXd r = build_whitener(rho).dense(n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  return svd.singularValues()(0);
}

}  // namespace whitelasso
