#include "mdsampler/config.hpp"

#include "mdsampler/errors.hpp"

namespace md {

void SamplerConfig::validate() const {
  if (levels < 2) throw ConfigError("L must be >= 2");
  if (!(delta_h > 0.0)) throw ConfigError("delta-h must be > 0");
  if (p_mix < 0.0 || p_mix >= 1.0) throw ConfigError("p-mx must lie in [0, 1)");
  if (max_modes < 1) throw ConfigError("kstar must be >= 1");
  if (burn_in < 0) throw ConfigError("burnin must be >= 0");
  if (total_iters < burn_in) throw ConfigError("iters must be >= burnin");
  if (!(local_scale > 0.0)) throw ConfigError("sigma must be > 0");
  if (!(prior_count > 0.0)) throw ConfigError("prior count b must be > 0");
  if (!(mode_tol > 0.0)) throw ConfigError("mode tolerance must be > 0");
  if (!(gamma_rho > 0.0 && gamma_rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  if (!(gamma_eta > 0.0)) throw ConfigError("eta must be > 0");
  if (!(gamma_eps > 0.0)) throw ConfigError("epsilon-gamma must be > 0");
}

}  // namespace md
