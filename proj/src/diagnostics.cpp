#include "mdsampler/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace md {

DiagnosticsReport evaluate_diagnostics(const DiagnosticsInput& input,
                                       const DiagnosticsThresholds& thresholds) {
  DiagnosticsReport report;

  // (a) final gamma and visit uniformity over the ever-occupied cells.
  std::vector<double> freq;
  for (std::size_t i = 0; i < input.visits.size(); ++i)
    if (!input.occupied.empty() && input.occupied[i])
      freq.push_back(static_cast<double>(input.visits[i]));
  if (!freq.empty()) {
    double mean = 0.0;
    for (double v : freq) mean += v;
    mean /= static_cast<double>(freq.size());
    for (double v : freq)
      report.max_visit_deviation = std::max(report.max_visit_deviation, std::abs(v - mean) / mean);
  }
  if (input.gamma_final > thresholds.gamma_max ||
      report.max_visit_deviation > thresholds.visit_deviation_max) {
    report.run_length_flag = true;
  }

  // (b) movement of W and V over the final 10% of iterations.
  for (std::size_t i = 0; i < std::min(input.w_snapshot.size(), input.w_final.size()); ++i)
    report.max_weight_change =
        std::max(report.max_weight_change, std::abs(input.w_final[i] - input.w_snapshot[i]));
  for (std::size_t i = 0; i < std::min(input.stat_snapshot.size(), input.stat_final.size()); ++i) {
    const double denom = std::max(std::abs(input.stat_snapshot[i]), 1e-12);
    report.max_stat_change =
        std::max(report.max_stat_change, std::abs(input.stat_final[i] - input.stat_snapshot[i]) / denom);
  }
  if (report.max_weight_change > thresholds.weight_change_max ||
      report.max_stat_change > thresholds.stat_change_max) {
    report.stability_flag = true;
  }

  // (c) sane range of the adaptive statistics.
  report.stat_min = input.stat_min;
  report.stat_max = input.stat_max;
  if (input.active_domains > 0 &&
      (input.stat_min < thresholds.stat_range_lo || input.stat_max > thresholds.stat_range_hi)) {
    report.stat_range_flag = true;
  }

  if (report.run_length_flag || report.stability_flag)
    report.recommendations.push_back("extend run");
  if (report.stat_range_flag)
    report.recommendations.push_back("reinitialize with smaller gamma_1");
  return report;
}

}  // namespace md
