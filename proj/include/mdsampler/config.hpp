#pragma once

#include <cstdint>

#include "mdsampler/grid.hpp"

namespace md {

struct SamplerConfig {
  int levels = 10;                 // L
  double delta_h = 2.0;            // ladder spacing
  double p_mix = 0.1;              // mixed-jump probability
  int max_modes = 100;             // K*, registry capacity
  std::int64_t burn_in = 50'000;   // B
  std::int64_t total_iters = 1'000'000;  // n, including burn-in
  std::uint64_t seed = 1;
  Variant variant = Variant::md;
  double local_scale = 1.0;        // sigma of the local Gaussian proposal
  double prior_count = 0.5;        // b, mixed-jump category smoothing (DAG)
  double mode_tol = 1e-3;          // mode-match tolerance (continuous)

  double gamma_rho = 0.5;
  double gamma_eta = 0.25;
  double gamma_eps = 1e-4;

  // Mixed jumps are an MD-only feature; MD0 and the WL baseline run with
  // local moves only.
  double effective_p_mix() const { return variant == Variant::md ? p_mix : 0.0; }

  void validate() const;  // throws ConfigError
};

}  // namespace md
