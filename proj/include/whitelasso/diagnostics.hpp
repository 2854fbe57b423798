#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "whitelasso/datagen.hpp"
#include "whitelasso/random.hpp"
#include "whitelasso/tuning.hpp"

namespace whitelasso {

struct ErrorReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double l2_scaled = 0.0;  // l2 / sqrt(p)
};

ErrorReport estimation_errors(const Eigen::VectorXd& beta_est, const Eigen::VectorXd& beta0);

// sign(beta_est_i) == sign(beta0_i) for every i, with sign(0) = 0.
bool sign_recovered(const Eigen::VectorXd& beta_est, const Eigen::VectorXd& beta0);

// Cumulative sums F_t = sum_{k<=t} Var[eps_k], t = 1..n, with
// Var_k = rho^2 Var_{k-1} + sigma_u^2 and Var_1 from `init`. This is the
// squared Frobenius norm of the leading t x t block of the error factor.
std::vector<double> psi_frobenius_growth(int n, double rho, double sigma_u, const InitMode& init);

// Sampled restricted-eigenvalue probe over the cone
// { v : ||v_{S^c}||_1 <= alpha ||v_S||_1 }. v_S is standard normal; v_{S^c}
// is a normal direction rescaled to l1 mass alpha * U * ||v_S||_1 with
// U ~ Uniform[0,1]. min_ratio is the smallest ||Xv||^2 / (n ||v||^2) seen: an
// upper estimate of the RE constant, not a certificate.
struct ReProbe {
  double alpha = 0.0;
  std::vector<int> support;
  int num_samples = 0;
  double min_ratio = 0.0;
};

ReProbe re_cone_probe(const Eigen::MatrixXd& X, const std::vector<int>& support, double alpha, int num_samples,
                      Rng& rng);

enum class BoundKind { Prop1Lasso, Thm1Oracle, Prop3ArRelError, Cor3Fgls };

std::string bound_name(BoundKind kind);

struct BoundReport {
  BoundKind name = BoundKind::Prop1Lasso;
  std::vector<std::pair<std::string, double>> inputs;  // formula arguments, in order
  double value = 0.0;
  bool vacuous = false;  // curvature constant <= 0; value is NaN

  double input(const std::string& key) const;
};

// (12K / (sqrt(c) kappa)) delta((1 - rho^2) n, p^(s tau)).
BoundReport bound_prop1(const TheoryConstants& consts, double kappa, double n, double p, int s, double rho);

// 27|S| lambda^2 / (8 kappa^2) + lambda tail / kappa + (144 / kappa) sigma_max^2 delta^2(n, p) tail^2,
// where tail = ||beta0 off S||_1.
BoundReport bound_thm1(double lambda_t, double kappa_t, int s_size, double tail_l1, double sigma_max, double n,
                       double p);

// C delta(n, p^(s tau)): relative error of the AR(1) estimate.
BoundReport bound_prop3(const TheoryConstants& consts, double n, double p, int s);

// 2^7 / (sqrt(c) eta^2) sqrt(2/3) (1 + rho^2/(1-rho^2) C sqrt(s tau ln p / n)) delta(n, p^(s tau)),
// with eta the smallest singular value of Sigma^(1/2).
BoundReport bound_cor3(const TheoryConstants& consts, double eta_min, double n, double p, int s, double rho);

// eta^2 / 4 - 9 sigma_max^2 (ln p / n) (1 + alpha)^2 s; can be <= 0 for small n.
double kappa_lasso(double eta_min, double sigma_max, double n, double p, double alpha, int s);

// 2^-5 (1 + gamma_n)^2 eta^2 with gamma_n = ||R||_F^2 / (2n).
double kappa_gls(double eta_min, double rho, int n);

// ||R||_F^2 / (2n) for the n x n whitening matrix.
double whitener_gamma(double rho, int n);

// Largest singular value of the n x n whitening matrix (computed, not assumed).
double whitener_spectral_norm(double rho, int n);

}  // namespace whitelasso
