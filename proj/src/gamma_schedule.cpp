#include "mdsampler/gamma_schedule.hpp"

namespace md {

void mwl_update_gamma(GammaSchedule& sched, WeightMatrix& weights, std::int64_t t,
                      Variant variant, int active_domains) {
  if (sched.phase == GammaSchedule::Phase::deterministic || sched.gamma < sched.epsilon) {
    if (sched.phase != GammaSchedule::Phase::deterministic) {
      sched.phase = GammaSchedule::Phase::deterministic;
      sched.t_c = t;
      sched.inv_gamma = 1.0 / sched.gamma;
      sched.xi = sched.inv_gamma - static_cast<double>(t);
    }
    sched.inv_gamma += 1.0;
    sched.gamma = 1.0 / sched.inv_gamma;
    return;
  }

  const auto [dmax, cbar] = weights.counter_spread(variant, active_domains);
  // cbar == 0 means no occupied cell has been visited since the last reset;
  // treated as non-uniform.
  if (cbar > 0.0 && dmax < sched.eta * cbar) {
    sched.gamma *= sched.rho;
    weights.reset_counters();
  }
}

}  // namespace md
