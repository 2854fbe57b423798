#include "whitelasso/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace whitelasso {

double InitMode::first_variance(double rho, double sigma_u) const {
  if (kind == Kind::Stationary) return sigma_u * sigma_u / (1.0 - rho * rho);
  return variance;
}

void DgpConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (p < 1) throw std::invalid_argument("p must be positive");
  if (s < 0 || s > p) throw std::invalid_argument("s must lie in [0, p]");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("rho must lie in (-1,1)");
  if (!(sigma_u > 0.0)) throw std::invalid_argument("sigma_u must be positive");
  if (init.kind == InitMode::Kind::FixedVariance && !(init.variance > 0.0))
    throw std::invalid_argument("initial variance must be positive");
  if (!(beta_magnitude > 0.0)) throw std::invalid_argument("beta magnitude must be positive");
  if (!design_diag.empty()) {
    if (static_cast<int>(design_diag.size()) != p)
      throw std::invalid_argument("design covariance diagonal must have p entries");
    for (double d : design_diag)
      if (!(d > 0.0)) throw std::invalid_argument("design covariance diagonal must be positive");
  }
}

int default_sparsity(int p) { return p / 10; }

BetaDraw make_beta0(int p, int s, double magnitude, Rng& rng) {
  if (p < 1) throw std::invalid_argument("make_beta0: p must be positive");
  if (s < 0 || s > p)
    throw std::invalid_argument("make_beta0: s=" + std::to_string(s) + " exceeds p=" + std::to_string(p));
  // Partial Fisher-Yates: the first s slots are a uniform s-subset.
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < s; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - i)));
    std::swap(idx[i], idx[j]);
  }
  BetaDraw out;
  out.beta = Eigen::VectorXd::Zero(p);
  out.support.assign(idx.begin(), idx.begin() + s);
  std::sort(out.support.begin(), out.support.end());
  for (int j : out.support) out.beta(j) = magnitude * rng.rademacher();
  return out;
}

Ar1Noise simulate_ar1_noise(int n, double rho, double sigma_u, const InitMode& init, Rng& rng) {
  if (n < 1) throw std::invalid_argument("simulate_ar1_noise: n must be positive");
  if (!(std::abs(rho) < 1.0))
    throw std::invalid_argument("rho must lie in (-1,1); a unit root is not simulatable as stationary");
  if (!(sigma_u > 0.0)) throw std::invalid_argument("sigma_u must be positive");

  Ar1Noise out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double z1 = rng.normal();
  out.u(0) = sigma_u * z1;
  out.epsilon(0) = std::sqrt(init.first_variance(rho, sigma_u)) * z1;
  for (int t = 1; t < n; ++t) {
    out.u(t) = sigma_u * rng.normal();
    out.epsilon(t) = rho * out.epsilon(t - 1) + out.u(t);
  }
  return out;
}

SimulatedDataset simulate_dataset(const DgpConfig& config) {
  config.validate();
  Rng rng(config.seed);

  SimulatedDataset ds;
  auto beta = make_beta0(config.p, config.s, config.beta_magnitude, rng);
  ds.beta0 = std::move(beta.beta);
  ds.support = std::move(beta.support);

  std::vector<double> scale(config.p, 1.0);
  if (!config.design_diag.empty())
    for (int j = 0; j < config.p; ++j) scale[j] = std::sqrt(config.design_diag[j]);

  ds.X.resize(config.n, config.p);
  for (int t = 0; t < config.n; ++t)
    for (int j = 0; j < config.p; ++j) ds.X(t, j) = scale[j] * rng.normal();

  auto noise = simulate_ar1_noise(config.n, config.rho, config.sigma_u, config.init, rng);
  ds.epsilon = std::move(noise.epsilon);
  ds.u = std::move(noise.u);
  ds.y = ds.X * ds.beta0 + ds.epsilon;
  return ds;
}

}  // namespace whitelasso
