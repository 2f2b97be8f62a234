#include "mdsampler/io/evaluate.hpp"

#include <algorithm>
#include <map>

#include "mdsampler/errors.hpp"

namespace md {

std::vector<std::pair<int, int>> threshold_network(const std::vector<double>& adjacency, int nodes,
                                                   double threshold) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      if (i != j && adjacency[static_cast<std::size_t>(i) * nodes + j] >= threshold)
        edges.emplace_back(i, j);
  return edges;
}

EdgeScore score_vs_reference(const std::vector<std::pair<int, int>>& edges, const Dag& reference) {
  EdgeScore score;
  score.reference_edges = reference.edge_count();
  for (const auto& [i, j] : edges) {
    if (reference.has_edge(i, j))
      ++score.true_positives;
    else
      ++score.false_positives;
  }
  return score;
}

std::vector<std::vector<std::int64_t>> crossval_split(const DiscreteDataset& data, int folds,
                                                      SplitMode mode, RngStream& rng) {
  if (folds < 2) throw ConfigError("cross validation needs at least 2 folds");
  const std::int64_t rows = data.rows();
  if (mode == SplitMode::by_row) {
    if (folds > rows) throw ConfigError("more folds than rows");
    std::vector<std::int64_t> ids(static_cast<std::size_t>(rows));
    for (std::int64_t r = 0; r < rows; ++r) ids[static_cast<std::size_t>(r)] = r;
    for (std::size_t i = ids.size(); i > 1; --i)
      std::swap(ids[i - 1], ids[rng.uniform_int(i)]);
    std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < ids.size(); ++i)
      out[i % static_cast<std::size_t>(folds)].push_back(ids[i]);
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
  }
  if (data.conditions.empty())
    throw DataError("by-condition split requires condition labels");
  std::map<std::string, std::vector<std::int64_t>> groups;
  for (std::int64_t r = 0; r < rows; ++r)
    groups[data.conditions[static_cast<std::size_t>(r)]].push_back(r);
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(groups.size());
  for (auto& [label, ids] : groups) out.push_back(std::move(ids));
  return out;
}

}  // namespace md
