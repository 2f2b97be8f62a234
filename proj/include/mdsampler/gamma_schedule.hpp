#pragma once

#include <cstdint>
#include <optional>

#include "mdsampler/grid.hpp"

namespace md {

// Step-size schedule for the weight adaptation. While gamma >= epsilon the
// schedule is adaptive: gamma shrinks by rho only when all occupied cells have
// been visited with roughly equal frequency since the last shrink. Below
// epsilon it switches permanently to the deterministic harmonic decay
// gamma_t = 1/(t + xi), tracked through its reciprocal so 1/gamma grows by
// exactly one per iteration.
struct GammaSchedule {
  double gamma = 1.0;
  double rho = 0.5;
  double eta = 0.25;
  double epsilon = 1e-4;

  enum class Phase { adaptive, deterministic };
  Phase phase = Phase::adaptive;
  std::optional<std::int64_t> t_c;  // first iteration with gamma < epsilon
  std::optional<double> xi;         // 1/gamma_{t_c} - t_c
  double inv_gamma = 0.0;           // valid in the deterministic phase
};

// One schedule update, called after the weight/counter update of iteration t.
void mwl_update_gamma(GammaSchedule& sched, WeightMatrix& weights, std::int64_t t,
                      Variant variant, int active_domains);

}  // namespace md
