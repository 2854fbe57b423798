#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "whitelasso/random.hpp"

namespace whitelasso {

// Distribution of the first AR(1) error.
struct InitMode {
  enum class Kind { Stationary, FixedVariance };
  Kind kind = Kind::Stationary;
  double variance = 1.0;  // Var[eps_1], used only for FixedVariance

  static InitMode stationary() { return {}; }
  static InitMode fixed_variance(double v1) { return {Kind::FixedVariance, v1}; }

  // Var[eps_1] for the given AR parameter and innovation std.
  double first_variance(double rho, double sigma_u) const;
};

struct DgpConfig {
  int n = 100;
  int p = 128;
  int s = 12;
  double rho = 0.0;
  double sigma_u = 1.0;
  InitMode init;
  std::vector<double> design_diag;  // empty: Sigma = I
  double beta_magnitude = 1.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

// s = floor(p / 10).
int default_sparsity(int p);

struct SimulatedDataset {
  Eigen::MatrixXd X;        // n x p
  Eigen::VectorXd y;        // X * beta0 + epsilon
  Eigen::VectorXd beta0;
  std::vector<int> support;  // sorted, zero-based
  Eigen::VectorXd epsilon;  // AR(1) errors
  Eigen::VectorXd u;        // innovations
};

struct BetaDraw {
  Eigen::VectorXd beta;
  std::vector<int> support;
};

// s nonzero entries at uniformly random positions, each +-magnitude.
BetaDraw make_beta0(int p, int s, double magnitude, Rng& rng);

struct Ar1Noise {
  Eigen::VectorXd epsilon;
  Eigen::VectorXd u;
};

// eps_t = rho * eps_{t-1} + u_t with u_t ~ N(0, sigma_u^2). eps_1 is drawn from
// the same standard normal as u_1, scaled to the variance set by `init`, so
// the number of draws does not depend on rho or init.
Ar1Noise simulate_ar1_noise(int n, double rho, double sigma_u, const InitMode& init, Rng& rng);

// Draw order: beta0, then X row by row, then the noise. Given a seed the
// design, beta0 and innovations are shared across every rho and init mode.
SimulatedDataset simulate_dataset(const DgpConfig& config);

}  // namespace whitelasso
