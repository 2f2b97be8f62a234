#pragma once

#include <utility>
#include <vector>

#include "mdsampler/continuous/descent.hpp"
#include "mdsampler/continuous/proposals.hpp"
#include "mdsampler/continuous/target.hpp"
#include "mdsampler/engine.hpp"
#include "mdsampler/linalg.hpp"

namespace md {

// Euclidean instance of the sampler's state-space contract. Basins are
// identified by gradient ascent, the local proposal is a spherical Gaussian
// random walk, the mixed jump is an equal-weight Gaussian mixture over the
// registered modes, and the per-domain statistic is the second moment around
// the mode.
class ContinuousModel {
 public:
  using State = std::vector<double>;

  ContinuousModel(const ContinuousTarget& target, double sigma, double mode_tol,
                  double initial_variance = 0.01)
      : target_(&target), sigma_(sigma), mode_tol_(mode_tol), initial_variance_(initial_variance) {}

  int dimension() const { return target_->dimension(); }

  double log_density(const State& x) const { return target_->log_density(x); }

  State descend_to_mode(const State& x) const { return gradient_descent_mode(*target_, x); }

  bool states_equal(const State& a, const State& b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return s <= mode_tol_ * mode_tol_;
  }

  Proposal<State> local_propose(const State& x, RngStream& rng) const {
    return local_propose_gaussian(x, sigma_, rng);
  }

  State mixed_jump_sample(const State& mode, const std::vector<double>& stat, RngStream& rng) const {
    return mixed_jump_gaussian_sample(mode, stat, rng);
  }

  double mixed_jump_log_density(const ModeRegistry<State>& registry, const State& y) const {
    return mixed_jump_gaussian_log_density(registry, y);
  }

  // g_k(x) = (x - nu_k)(x - nu_k)^T, flattened row-major.
  std::vector<double> adapt_statistic(const State& x, const State& mode) const {
    const std::size_t m = x.size();
    std::vector<double> g(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) g[i * m + j] = (x[i] - mode[i]) * (x[j] - mode[j]);
    return g;
  }

  std::vector<double> initial_adapt_statistic() const {
    const std::size_t m = static_cast<std::size_t>(dimension());
    std::vector<double> v(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) v[i * m + i] = initial_variance_;
    return v;
  }

  std::pair<double, double> stat_range(const std::vector<double>& stat) const {
    const auto eig = symmetric_eigenvalues(stat, static_cast<std::size_t>(dimension()));
    return {eig.front(), eig.back()};
  }

 private:
  const ContinuousTarget* target_;
  double sigma_;
  double mode_tol_;
  double initial_variance_;
};

static_assert(StateSpaceModel<ContinuousModel>);

}  // namespace md
