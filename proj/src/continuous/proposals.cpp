#include "mdsampler/continuous/proposals.hpp"

#include <cmath>

#include "mdsampler/errors.hpp"
#include "mdsampler/linalg.hpp"

namespace md {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// The mixed jump draws from N(nu, V + delta I). The jitter keeps the proposal
// covariance factorizable when the adapted statistic degenerates toward a
// rank-deficient matrix (long rejection streaks blend in the same outer
// product); sampler and density share it, so the proposal pair stays exact.
constexpr double kProposalJitter = 1e-8;

std::vector<double> jittered(std::span<const double> covariance, std::size_t m) {
  std::vector<double> v(covariance.begin(), covariance.end());
  for (std::size_t i = 0; i < m; ++i) v[i * m + i] += kProposalJitter;
  return v;
}

}  // namespace

double gaussian_log_density(std::span<const double> x, std::span<const double> mean, double sigma,
                            std::optional<std::span<const double>> v) {
  const std::size_t m = x.size();
  if (!v) {
    double quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = (x[i] - mean[i]) / sigma;
      quad += d * d;
    }
    return -0.5 * (static_cast<double>(m) * kLog2Pi + 2.0 * m * std::log(sigma) + quad);
  }
  std::vector<double> lower;
  if (!cholesky(*v, m, lower)) throw NumericalError("adaptation matrix is not positive definite");
  return mvn_log_density(x, mean, lower, m, sigma * sigma);
}

Proposal<std::vector<double>> local_propose_gaussian(std::span<const double> x, double sigma,
                                                     RngStream& rng,
                                                     std::optional<std::span<const double>> adapt) {
  const std::size_t m = x.size();
  Proposal<std::vector<double>> prop;
  if (!adapt) {
    prop.y.resize(m);
    for (std::size_t i = 0; i < m; ++i) prop.y[i] = x[i] + sigma * rng.normal();
    const double d = gaussian_log_density(prop.y, x, sigma);
    prop.log_fwd = d;
    prop.log_rev = d;
    return prop;
  }
  std::vector<double> lower;
  if (!cholesky(*adapt, m, lower)) throw NumericalError("adaptation matrix is not positive definite");
  prop.y = mvn_sample(x, lower, m, sigma * sigma, rng);
  prop.log_fwd = mvn_log_density(prop.y, x, lower, m, sigma * sigma);
  prop.log_rev = mvn_log_density(x, prop.y, lower, m, sigma * sigma);
  return prop;
}

std::vector<double> mixed_jump_gaussian_sample(std::span<const double> mode,
                                               std::span<const double> covariance, RngStream& rng) {
  const std::size_t m = mode.size();
  std::vector<double> lower;
  if (!cholesky(jittered(covariance, m), m, lower))
    throw NumericalError("mixed-jump covariance is not positive definite");
  return mvn_sample(mode, lower, m, 1.0, rng);
}

double mixed_jump_gaussian_log_density(const ModeRegistry<std::vector<double>>& registry,
                                       std::span<const double> y) {
  const int modes = registry.size();
  std::vector<double> comps(static_cast<std::size_t>(modes));
  for (int k = 1; k <= modes; ++k) {
    const auto& entry = registry.entry(k);
    const std::size_t m = entry.mode.size();
    std::vector<double> lower;
    if (!cholesky(jittered(entry.stat, m), m, lower))
      throw NumericalError("mixed-jump covariance is not positive definite");
    comps[static_cast<std::size_t>(k - 1)] = mvn_log_density(y, entry.mode, lower, m, 1.0);
  }
  return log_sum_exp(comps) - std::log(static_cast<double>(modes));
}

}  // namespace md
