#include "mdsampler/dag/score.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "mdsampler/errors.hpp"

namespace md {

namespace {

double family_term(const FamilyCounts& fc, double log_beta, double alpha) {
  const int r = fc.child_arity;
  const int q = fc.parent_states;
  const double a_jk = alpha / (static_cast<double>(r) * q);
  const double a_k = alpha / static_cast<double>(q);
  double score = static_cast<double>(fc.parents.size()) * log_beta;
  const double lg_a_k = std::lgamma(a_k);
  const double lg_a_jk = std::lgamma(a_jk);
  for (int k = 0; k < q; ++k) {
    std::int64_t n_k = 0;
    for (int j = 0; j < r; ++j) n_k += fc.n[static_cast<std::size_t>(k) * r + j];
    if (n_k == 0) continue;  // empty parent state contributes nothing
    score += lg_a_k - std::lgamma(a_k + static_cast<double>(n_k));
    for (int j = 0; j < r; ++j) {
      const std::int64_t n_jk = fc.n[static_cast<std::size_t>(k) * r + j];
      if (n_jk != 0) score += std::lgamma(a_jk + static_cast<double>(n_jk)) - lg_a_jk;
    }
  }
  return score;
}

}  // namespace

ScoreCache::ScoreCache(const DiscreteDataset& data, double beta, double alpha)
    : data_(&data), beta_(beta), alpha_(alpha), log_beta_(std::log(beta)) {
  if (data.nodes > 16) throw ConfigError("score cache supports up to 16 variables");
  mask_bits_ = data.nodes;
  cache_.assign(static_cast<std::size_t>(data.nodes) << mask_bits_,
                std::numeric_limits<double>::quiet_NaN());
}

double ScoreCache::compute_family(int child, std::uint32_t parent_mask) const {
  const FamilyCounts fc = count_family(*data_, child, parent_mask);
  return family_term(fc, log_beta_, alpha_);
}

double ScoreCache::family_score(int child, std::uint32_t parent_mask) const {
  double& slot = cache_[(static_cast<std::size_t>(child) << mask_bits_) | parent_mask];
  if (std::isnan(slot)) slot = compute_family(child, parent_mask);
  return slot;
}

double ScoreCache::log_score(const Dag& g) const {
  double s = 0.0;
  for (int i = 0; i < g.nodes(); ++i) s += family_score(i, g.parent_mask(i));
  return s;
}

double ScoreCache::move_delta(const Dag& g, const DagMove& move) const {
  const std::uint32_t to_mask = g.parent_mask(move.to);
  switch (move.kind) {
    case DagMove::Kind::add:
      return family_score(move.to, to_mask | (1u << move.from)) - family_score(move.to, to_mask);
    case DagMove::Kind::remove:
      return family_score(move.to, to_mask & ~(1u << move.from)) - family_score(move.to, to_mask);
    case DagMove::Kind::reverse: {
      const std::uint32_t from_mask = g.parent_mask(move.from);
      return family_score(move.to, to_mask & ~(1u << move.from)) - family_score(move.to, to_mask) +
             family_score(move.from, from_mask | (1u << move.to)) - family_score(move.from, from_mask);
    }
  }
  return 0.0;
}

void ScoreCache::precompute_all(int indegree_cap) {
  const std::uint32_t masks = 1u << mask_bits_;
  for (int child = 0; child < data_->nodes; ++child) {
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      if ((mask >> child) & 1u) continue;
      if (std::popcount(mask) > indegree_cap) continue;
      family_score(child, mask);
    }
  }
}

double log_posterior_score(const Dag& g, const DiscreteDataset& data, double beta, double alpha) {
  if (!g.respects_cap()) throw ConfigError("graph exceeds the indegree cap");
  double s = 0.0;
  const double log_beta = std::log(beta);
  for (int i = 0; i < g.nodes(); ++i) {
    const FamilyCounts fc = count_family(data, i, g.parent_mask(i));
    s += family_term(fc, log_beta, alpha);
  }
  return s;
}

}  // namespace md
