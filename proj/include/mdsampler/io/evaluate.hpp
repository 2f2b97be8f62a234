#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdsampler/dag/dag.hpp"
#include "mdsampler/dag/dataset.hpp"
#include "mdsampler/rng.hpp"

namespace md {

// Directed edge set obtained by thresholding an expected adjacency matrix;
// not necessarily acyclic.
std::vector<std::pair<int, int>> threshold_network(const std::vector<double>& adjacency, int nodes,
                                                   double threshold);

struct EdgeScore {
  int true_positives = 0;
  int false_positives = 0;
  int reference_edges = 0;
};

EdgeScore score_vs_reference(const std::vector<std::pair<int, int>>& edges, const Dag& reference);

enum class SplitMode { by_row, by_condition };

// Fold assignments: by_row deals shuffled rows round-robin (sizes differ by
// at most one); by_condition makes one fold per distinct label.
std::vector<std::vector<std::int64_t>> crossval_split(const DiscreteDataset& data, int folds,
                                                      SplitMode mode, RngStream& rng);

}  // namespace md
