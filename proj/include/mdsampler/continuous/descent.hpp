#pragma once

#include <vector>

#include "mdsampler/continuous/target.hpp"

namespace md {

struct DescentOptions {
  double gradient_tol = 1e-8;   // stop when ||grad||_2 falls below this
  double stall_tol = 1e-5;      // accept a line-search stall this close to a mode
  double initial_step = 1.0;
  double armijo_c1 = 1e-4;
  double max_coord_step = 0.25; // per-coordinate displacement cap
  int max_iterations = 10'000;
};

// Gradient ascent on log p with Armijo backtracking. The per-coordinate step
// cap keeps each coordinate inside its basin of attraction, so the endpoint
// identifies the basin of the start point. Throws DescentError when the
// iteration budget is exhausted away from a mode.
std::vector<double> gradient_descent_mode(const ContinuousTarget& target,
                                          std::span<const double> start,
                                          const DescentOptions& options = {});

}  // namespace md
