#include "mdsampler/io/predictive.hpp"

#include <cmath>

#include "mdsampler/errors.hpp"
#include "mdsampler/linalg.hpp"

namespace md {

PredictiveModel::PredictiveModel(const Dag& graph, const DiscreteDataset& training, double alpha)
    : graph_(graph), alpha_(alpha), arities_(training.arities) {
  if (graph.nodes() != training.nodes)
    throw DataError("predictive graph and training data disagree on the variable count");
  families_.reserve(static_cast<std::size_t>(graph.nodes()));
  for (int i = 0; i < graph.nodes(); ++i)
    families_.push_back(count_family(training, i, graph.parent_mask(i)));
}

double PredictiveModel::log_probability(const std::uint8_t* row_values,
                                        const std::uint8_t* row_mask) const {
  double log_p = 0.0;
  for (int i = 0; i < graph_.nodes(); ++i) {
    if (row_mask[i]) continue;  // intervened nodes contribute nothing
    const FamilyCounts& fc = families_[static_cast<std::size_t>(i)];
    const int k = parent_state_index(fc.parents, arities_, row_values);
    const int j = row_values[i];
    const double a_jk = alpha_ / (static_cast<double>(fc.child_arity) * fc.parent_states);
    const double a_k = alpha_ / static_cast<double>(fc.parent_states);
    std::int64_t n_k = 0;
    for (int s = 0; s < fc.child_arity; ++s)
      n_k += fc.n[static_cast<std::size_t>(k) * fc.child_arity + s];
    const std::int64_t n_jk = fc.n[static_cast<std::size_t>(k) * fc.child_arity + (j - 1)];
    log_p += std::log(a_jk + static_cast<double>(n_jk)) - std::log(a_k + static_cast<double>(n_k));
  }
  return log_p;
}

double PredictiveModel::log_probability(const DiscreteDataset& data, std::int64_t row) const {
  const std::size_t base = static_cast<std::size_t>(row) * data.nodes;
  return log_probability(data.values.data() + base, data.intervened.data() + base);
}

double dr_predictive_log_probability(const DiscreteDataset& data, std::int64_t row,
                                     const std::vector<PredictiveModel>& local_models,
                                     const std::vector<double>& lambdas,
                                     const PredictiveModel& fallback, double lambda0) {
  std::vector<double> terms;
  terms.reserve(local_models.size() + 1);
  if (lambda0 > 0.0)
    terms.push_back(std::log(lambda0) + fallback.log_probability(data, row));
  for (std::size_t k = 0; k < local_models.size(); ++k) {
    if (lambdas[k] <= 0.0) continue;
    terms.push_back(std::log(lambdas[k]) + local_models[k].log_probability(data, row));
  }
  if (terms.empty()) throw NumericalError("domain-based predictive has no positive-mass domain");
  return log_sum_exp(terms);
}

}  // namespace md
