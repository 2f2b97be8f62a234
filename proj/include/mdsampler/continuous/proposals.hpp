#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mdsampler/engine.hpp"
#include "mdsampler/rng.hpp"

namespace md {

// Random-walk Gaussian proposal. Without an adaptation matrix the proposal is
// N(x, sigma^2 I) and forward/reverse densities coincide. With one, the draw
// is N(x, sigma^2 V) and the returned densities both use V; across domain
// boundaries the caller re-evaluates the reverse density under the other
// domain's matrix via gaussian_log_density.
Proposal<std::vector<double>> local_propose_gaussian(
    std::span<const double> x, double sigma, RngStream& rng,
    std::optional<std::span<const double>> adapt = std::nullopt);

// Log density of N(mean, sigma^2 V) at x; V = identity when absent.
double gaussian_log_density(std::span<const double> x, std::span<const double> mean, double sigma,
                            std::optional<std::span<const double>> v = std::nullopt);

// Equal-weight Gaussian mixture over the registered modes: the mixed jump of
// the Euclidean instance.
std::vector<double> mixed_jump_gaussian_sample(std::span<const double> mode,
                                               std::span<const double> covariance, RngStream& rng);

double mixed_jump_gaussian_log_density(const ModeRegistry<std::vector<double>>& registry,
                                       std::span<const double> y);

}  // namespace md
