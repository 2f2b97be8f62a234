#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mdsampler/dag/dag.hpp"
#include "mdsampler/dag/dataset.hpp"

namespace md {

// Decomposable log posterior over DAG structures: an edge-penalizing
// structure prior beta^{sum |Pi_i|} times the intervention-aware
// Dirichlet-multinomial marginal likelihood. Per-node family terms are cached
// by (node, parent mask); the cache is filled lazily, or eagerly via
// precompute_all() for read-only concurrent use.
class ScoreCache {
 public:
  ScoreCache(const DiscreteDataset& data, double beta = 0.1, double alpha = 1.0);

  int nodes() const { return data_->nodes; }
  double beta() const { return beta_; }
  double alpha() const { return alpha_; }
  const DiscreteDataset& data() const { return *data_; }

  // Family term for (child, parent mask), including the prior contribution.
  double family_score(int child, std::uint32_t parent_mask) const;

  double log_score(const Dag& g) const;

  // Score change of a move without materializing the neighbor.
  double move_delta(const Dag& g, const DagMove& move) const;

  // Fills every family consistent with the indegree cap (m <= 16 only).
  void precompute_all(int indegree_cap);

 private:
  double compute_family(int child, std::uint32_t parent_mask) const;

  const DiscreteDataset* data_;
  double beta_;
  double alpha_;
  double log_beta_;
  mutable std::vector<double> cache_;  // m * 2^m slots, NaN = not computed
  int mask_bits_ = 0;
};

// Direct (uncached) evaluation, kept as an independent route for tests.
double log_posterior_score(const Dag& g, const DiscreteDataset& data, double beta, double alpha);

}  // namespace md
