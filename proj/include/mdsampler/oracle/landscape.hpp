#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdsampler/dag/dag.hpp"
#include "mdsampler/dag/dataset.hpp"

namespace md {

struct LandscapeMode {
  Dag graph;
  double log_score = 0.0;
  double lambda = 0.0;                // exact basin probability mass
  std::vector<double> adjacency;      // conditional expected adjacency on the basin
  std::int64_t basin_size = 0;        // number of DAGs attracted to the mode
};

// Exact ground truth for small networks: every cap-respecting DAG scored, its
// basin under steepest neighbor ascent resolved, and the posterior aggregated
// per basin.
struct ExactLandscape {
  int nodes = 0;
  int indegree_cap = 4;
  double beta = 0.1;
  double alpha = 1.0;
  std::int64_t dag_count = 0;
  double log_normalizer = 0.0;            // log sum over DAGs of exp(score)
  std::vector<LandscapeMode> modes;       // sorted by score, best first
  std::vector<double> mean_adjacency;     // direct sum of posterior x adjacency
  std::uint64_t dataset_digest = 0;

  int mode_index(const Dag& g) const;     // -1 when g is not a recorded mode
};

// OpenMP-parallel construction: basins resolved through a shared memo of the
// ascent successor map, posterior aggregated per basin in thread-local
// partials.
ExactLandscape exact_landscape(const DiscreteDataset& data, double beta, double alpha,
                               int indegree_cap);

// Serial reference: one full steepest-neighbor-ascent per DAG, no memo, no
// threading. Kept for testing the parallel kernel and for benchmarks.
ExactLandscape exact_landscape_serial_reference(const DiscreteDataset& data, double beta,
                                                double alpha, int indegree_cap);

void save_landscape(const ExactLandscape& landscape, const std::string& path);
ExactLandscape load_landscape(const std::string& path);

}  // namespace md
