#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdsampler/grid.hpp"

namespace md {

struct DiagnosticsThresholds {
  double gamma_max = 1e-3;          // final gamma should be below this
  double visit_deviation_max = 0.9; // max relative deviation of cell visits
  double weight_change_max = 0.05;  // |delta w| over the final 10%, log scale
  double stat_change_max = 0.05;    // relative change of V over the final 10%
  double stat_range_lo = 1e-8;      // sane range for V (eigenvalues/components)
  double stat_range_hi = 1e8;
};

struct DiagnosticsInput {
  double gamma_final = 0.0;
  int active_domains = 0;
  // Lifetime main-phase visits per cell, row-major (M+1) x L, with the
  // ever-occupied mask deciding which cells are expected to be visited.
  std::vector<std::int64_t> visits;
  std::vector<std::uint8_t> occupied;
  int levels = 0;
  // Snapshots at 90% and 100% of the main phase.
  std::vector<double> w_snapshot;
  std::vector<double> w_final;
  std::vector<double> stat_snapshot;  // concatenated V_k
  std::vector<double> stat_final;
  // Extremes of the per-domain statistics (eigenvalues for covariance stats,
  // raw components for count stats).
  double stat_min = 1.0;
  double stat_max = 1.0;
};

struct DiagnosticsReport {
  bool run_length_flag = false;   // gamma still large or visits non-uniform
  bool stability_flag = false;    // W or V still moving over the final 10%
  bool stat_range_flag = false;   // V escaped its sane range
  double max_visit_deviation = 0.0;
  double max_weight_change = 0.0;
  double max_stat_change = 0.0;
  double stat_min = 0.0;
  double stat_max = 0.0;
  std::vector<std::string> recommendations;
  bool all_clear() const { return !run_length_flag && !stability_flag && !stat_range_flag; }
};

DiagnosticsReport evaluate_diagnostics(const DiagnosticsInput& input,
                                       const DiagnosticsThresholds& thresholds = {});

}  // namespace md
