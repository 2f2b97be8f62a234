#pragma once

#include <vector>

#include "mdsampler/dag/dag.hpp"
#include "mdsampler/dag/dataset.hpp"

namespace md {

// Dirichlet-posterior predictive for a fixed graph: per-node family counts
// from the training data, evaluated row by row.
class PredictiveModel {
 public:
  PredictiveModel(const Dag& graph, const DiscreteDataset& training, double alpha = 1.0);

  const Dag& graph() const { return graph_; }

  // Sum over the row's non-intervened nodes of
  // log[(a_ijk + N_ijk) / (a_i.k + N_i.k)] at the realized (j, k).
  double log_probability(const std::uint8_t* row_values, const std::uint8_t* row_mask) const;
  double log_probability(const DiscreteDataset& data, std::int64_t row) const;

 private:
  Dag graph_;
  double alpha_;
  std::vector<int> arities_;
  std::vector<FamilyCounts> families_;
};

// Domain-based predictive: log sum_k lambda_k exp(log P(y | G_k)), with the
// residual domain k = 0 represented by a designated fallback graph.
double dr_predictive_log_probability(const DiscreteDataset& data, std::int64_t row,
                                     const std::vector<PredictiveModel>& local_models,
                                     const std::vector<double>& lambdas,
                                     const PredictiveModel& fallback, double lambda0);

}  // namespace md
