#include "mdsampler/dag/sna.hpp"

#include <bit>

#include "mdsampler/errors.hpp"

namespace md {

std::optional<DagMove> sna_step(const Dag& g, const ScoreCache& score) {
  const int m = g.nodes();
  const auto desc = g.descendants();
  std::optional<DagMove> best;
  double best_delta = 0.0;  // must strictly beat the current graph

  auto consider = [&](const DagMove& move) {
    const double delta = score.move_delta(g, move);
    if (delta > best_delta) {
      best_delta = delta;
      best = move;
    }
  };

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j || g.pair_value(std::min(i, j), std::max(i, j)) != 0) continue;
      if (g.indegree(j) < g.indegree_cap() && !((desc[static_cast<std::size_t>(j)] >> i) & 1u))
        consider({DagMove::Kind::add, i, j});
    }
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (g.has_edge(i, j)) consider({DagMove::Kind::remove, i, j});
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!g.has_edge(i, j)) continue;
      if (g.indegree(i) < g.indegree_cap() && g.reversal_is_acyclic(i, j))
        consider({DagMove::Kind::reverse, i, j});
    }
  }
  return best;
}

Dag sna_mode(const Dag& g, const ScoreCache& score) {
  Dag current = g;
  for (int it = 0; it < 10'000; ++it) {
    const auto move = sna_step(current, score);
    if (!move) return current;
    current = apply_move(current, *move);
  }
  throw DescentError("steepest neighbor ascent exhausted its step budget");
}

}  // namespace md
