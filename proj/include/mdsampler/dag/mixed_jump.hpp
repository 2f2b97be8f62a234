#pragma once

#include <span>
#include <vector>

#include "mdsampler/dag/dag.hpp"
#include "mdsampler/mode_registry.hpp"
#include "mdsampler/rng.hpp"

namespace md {

// Sequential edge-wise independence proposal around a mode. Pairs (i, j),
// i < j, are processed in lexicographic order on a working graph that starts
// at the mode; at each pair a categorical choice keeps, deletes, reverses or
// adds the edge with probabilities driven by the domain's expected edit
// counts stat = (v_a, v_d, v_r), each category smoothed by the prior count b.
// Options that would create a cycle or break the indegree cap are suppressed
// and the remainder renormalized; keeping the current value is always valid.
Dag dag_mixed_jump_sample(const Dag& mode, std::span<const double> stat, double prior_count,
                          RngStream& rng);

// Log density of one mixture component, by deterministic replay of the
// generation in the same pair order. -inf when some required value is
// suppressed at its step.
double dag_mixed_jump_component_log_density(const Dag& mode, std::span<const double> stat,
                                            double prior_count, const Dag& g);

// Log of the equal-weight mixture over all registered modes; -inf when every
// component assigns zero.
double dag_mixed_jump_log_density(const ModeRegistry<Dag>& registry, double prior_count,
                                  const Dag& g);

}  // namespace md
