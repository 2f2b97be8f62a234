#include "mdsampler/dag/mixed_jump.hpp"

#include <cmath>
#include <limits>

#include "mdsampler/linalg.hpp"

namespace md {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PairStep {
  int values[3];
  double weight[3];
  bool valid[3];
  double total = 0.0;
};

// Categorical options for the pair (i, j) given the working graph with that
// pair cleared. Option order is fixed so sampling and replay agree.
PairStep pair_step(const Dag& cleared, int i, int j, int nu_value, int mode_edges, int pair_count,
                   std::span<const double> stat, double prior_count) {
  PairStep step;
  const double v_a = stat[0];
  const double v_d = stat[1];
  const double v_r = stat[2];
  if (nu_value != 0) {
    step.values[0] = nu_value;   // retain
    step.values[1] = 0;          // delete
    step.values[2] = -nu_value;  // reverse
    step.weight[0] = std::max(static_cast<double>(mode_edges) - (v_r + v_d), 0.0) + prior_count;
    step.weight[1] = std::max(v_d, 0.0) + prior_count;
    step.weight[2] = std::max(v_r, 0.0) + prior_count;
  } else {
    step.values[0] = 0;   // keep empty
    step.values[1] = 1;   // add i -> j
    step.values[2] = -1;  // add j -> i
    step.weight[0] =
        std::max(static_cast<double>(pair_count - mode_edges) - v_a, 0.0) + prior_count;
    step.weight[1] = std::max(v_a / 2.0, 0.0) + prior_count;
    step.weight[2] = std::max(v_a / 2.0, 0.0) + prior_count;
  }
  for (int c = 0; c < 3; ++c) {
    const int v = step.values[c];
    if (v == 0) {
      step.valid[c] = true;
    } else {
      const int from = (v == 1) ? i : j;
      const int to = (v == 1) ? j : i;
      step.valid[c] =
          cleared.indegree(to) < cleared.indegree_cap() && cleared.addition_is_acyclic(from, to);
    }
    if (step.valid[c]) step.total += step.weight[c];
  }
  return step;
}

}  // namespace

Dag dag_mixed_jump_sample(const Dag& mode, std::span<const double> stat, double prior_count,
                          RngStream& rng) {
  Dag wg = mode;
  const int m = wg.nodes();
  const int edges = mode.edge_count();
  const int pairs = mode.pair_count();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const int nu_value = mode.pair_value(i, j);
      wg.set_pair(i, j, 0);
      const PairStep step = pair_step(wg, i, j, nu_value, edges, pairs, stat, prior_count);
      double u = rng.uniform() * step.total;
      int chosen = nu_value;  // retain is always valid
      for (int c = 0; c < 3; ++c) {
        if (!step.valid[c]) continue;
        if (u < step.weight[c]) {
          chosen = step.values[c];
          break;
        }
        u -= step.weight[c];
      }
      wg.set_pair(i, j, chosen);
    }
  }
  return wg;
}

double dag_mixed_jump_component_log_density(const Dag& mode, std::span<const double> stat,
                                            double prior_count, const Dag& g) {
  Dag wg = mode;
  const int m = wg.nodes();
  const int edges = mode.edge_count();
  const int pairs = mode.pair_count();
  double log_p = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const int nu_value = mode.pair_value(i, j);
      const int target = g.pair_value(i, j);
      wg.set_pair(i, j, 0);
      const PairStep step = pair_step(wg, i, j, nu_value, edges, pairs, stat, prior_count);
      double w = 0.0;
      for (int c = 0; c < 3; ++c)
        if (step.valid[c] && step.values[c] == target) w = step.weight[c];
      if (w <= 0.0) return kNegInf;
      log_p += std::log(w / step.total);
      wg.set_pair(i, j, target);
    }
  }
  return log_p;
}

double dag_mixed_jump_log_density(const ModeRegistry<Dag>& registry, double prior_count,
                                  const Dag& g) {
  const int modes = registry.size();
  std::vector<double> comps(static_cast<std::size_t>(modes));
  for (int k = 1; k <= modes; ++k) {
    const auto& entry = registry.entry(k);
    comps[static_cast<std::size_t>(k - 1)] =
        dag_mixed_jump_component_log_density(entry.mode, entry.stat, prior_count, g);
  }
  const double mix = log_sum_exp(comps);
  return std::isfinite(mix) ? mix - std::log(static_cast<double>(modes)) : kNegInf;
}

}  // namespace md
