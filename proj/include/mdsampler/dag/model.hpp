#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "mdsampler/dag/dag.hpp"
#include "mdsampler/dag/mixed_jump.hpp"
#include "mdsampler/dag/score.hpp"
#include "mdsampler/dag/sna.hpp"
#include "mdsampler/engine.hpp"

namespace md {

// DAG instance of the sampler's state-space contract. The density is the
// structure posterior, descent is steepest neighbor ascent over the
// add/delete/reverse move set, the local proposal is uniform over valid
// neighbors, and the mixed jump edits edges sequentially around a mode.
class DagModel {
 public:
  using State = Dag;

  DagModel(const ScoreCache& score, double prior_count)
      : score_(&score), prior_count_(prior_count) {}

  int nodes() const { return score_->nodes(); }

  double log_density(const State& g) const { return score_->log_score(g); }

  State descend_to_mode(const State& g) const { return sna_mode(g, *score_); }

  bool states_equal(const State& a, const State& b) const { return a == b; }

  Proposal<State> local_propose(const State& g, RngStream& rng) const {
    const auto moves = dag_neighbors(g);
    if (moves.empty()) throw NumericalError("DAG state has no valid neighbor");
    const auto& move = moves[rng.uniform_int(moves.size())];
    Proposal<State> prop{apply_move(g, move)};
    prop.log_fwd = -std::log(static_cast<double>(moves.size()));
    prop.log_rev = -std::log(static_cast<double>(count_dag_neighbors(prop.y)));
    return prop;
  }

  State mixed_jump_sample(const State& mode, const std::vector<double>& stat, RngStream& rng) const {
    return dag_mixed_jump_sample(mode, stat, prior_count_, rng);
  }

  double mixed_jump_log_density(const ModeRegistry<State>& registry, const State& g) const {
    return dag_mixed_jump_log_density(registry, prior_count_, g);
  }

  // g_k(G) = C(G; nu_k) = (additions, deletions, reversals).
  std::vector<double> adapt_statistic(const State& g, const State& mode) const {
    const EditCounts c = edit_counts(g, mode);
    return {static_cast<double>(c.additions), static_cast<double>(c.deletions),
            static_cast<double>(c.reversals)};
  }

  std::vector<double> initial_adapt_statistic() const { return {1.0, 1.0, 1.0}; }

  std::pair<double, double> stat_range(const std::vector<double>& stat) const {
    const auto [lo, hi] = std::minmax_element(stat.begin(), stat.end());
    return {*lo, *hi};
  }

 private:
  const ScoreCache* score_;
  double prior_count_;
};

static_assert(StateSpaceModel<DagModel>);

}  // namespace md
