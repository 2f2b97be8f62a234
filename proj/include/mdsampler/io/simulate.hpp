#pragma once

#include <string>
#include <vector>

#include "mdsampler/dag/dag.hpp"
#include "mdsampler/dag/dataset.hpp"
#include "mdsampler/rng.hpp"

namespace md {

// Generating Bayesian network: a structure with conditional probability
// tables theta[node][parent_state][state].
struct GroundTruthBn {
  Dag structure;
  std::vector<int> arities;
  std::vector<std::vector<std::vector<double>>> cpt;

  void check() const;  // rows sum to one, dimensions match the structure
  int draw_node(int node, const std::vector<int>& parent_order, const std::uint8_t* row,
                RngStream& rng) const;
};

// Ancestral sampling with a fixed fraction of interventional rows: each of
// the first ceil(fraction * n) rows clamps one uniformly chosen node to a
// uniformly chosen state.
DiscreteDataset simulate_dataset(const GroundTruthBn& bn, std::int64_t rows,
                                 double intervention_fraction, RngStream& rng);

// Condition-structured simulation: per condition, a block of rows with one
// designated node clamped in every row; condition labels are attached for
// by-condition splits.
DiscreteDataset simulate_condition_dataset(const GroundTruthBn& bn, std::int64_t rows_per_condition,
                                           const std::vector<int>& intervened_node_per_condition,
                                           RngStream& rng);

// Study networks. The six-node pair drives the simulation-versus-oracle
// comparison; the eleven-node ternary network stands in for the flow
// cytometry setting at desk scale.
GroundTruthBn make_chain6_network();
GroundTruthBn make_example6_network();
GroundTruthBn make_synth11_network();
GroundTruthBn make_preset_network(const std::string& name);  // by CLI name

}  // namespace md
