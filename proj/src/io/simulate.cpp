#include "mdsampler/io/simulate.hpp"

#include <bit>
#include <cmath>

#include "mdsampler/errors.hpp"

namespace md {

namespace {

std::vector<int> topological_order(const Dag& g) {
  std::vector<int> order;
  std::vector<int> indeg(static_cast<std::size_t>(g.nodes()));
  std::vector<int> stack;
  for (int i = 0; i < g.nodes(); ++i) {
    indeg[static_cast<std::size_t>(i)] = g.indegree(i);
    if (indeg[static_cast<std::size_t>(i)] == 0) stack.push_back(i);
  }
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    order.push_back(node);
    std::uint32_t cs = g.child_mask(node);
    while (cs) {
      const int c = std::countr_zero(cs);
      cs &= cs - 1;
      if (--indeg[static_cast<std::size_t>(c)] == 0) stack.push_back(c);
    }
  }
  if (static_cast<int>(order.size()) != g.nodes())
    throw DataError("generating network contains a cycle");
  return order;
}

std::vector<int> parent_list(const Dag& g, int node) {
  std::vector<int> parents;
  std::uint32_t ps = g.parent_mask(node);
  while (ps) {
    parents.push_back(std::countr_zero(ps));
    ps &= ps - 1;
  }
  return parents;
}

void sample_row(const GroundTruthBn& bn, const std::vector<int>& order,
                const std::vector<std::vector<int>>& parents, std::uint8_t* row, int clamped_node,
                RngStream& rng) {
  for (int node : order) {
    if (node == clamped_node) continue;
    row[node] = static_cast<std::uint8_t>(bn.draw_node(node, parents[static_cast<std::size_t>(node)], row, rng));
  }
}

// Peaked random CPT row; cube sharpening keeps rows distinct across parent
// states without making them deterministic.
std::vector<double> random_cpt_row(int arity, RngStream& rng) {
  std::vector<double> row(static_cast<std::size_t>(arity));
  double total = 0.0;
  for (auto& p : row) {
    const double u = -std::log(1.0 - rng.uniform());
    p = u * u * u;
    total += p;
  }
  for (auto& p : row) p /= total;
  return row;
}

}  // namespace

void GroundTruthBn::check() const {
  if (structure.nodes() != static_cast<int>(arities.size()) ||
      structure.nodes() != static_cast<int>(cpt.size()))
    throw DataError("generating network: inconsistent dimensions");
  for (int i = 0; i < structure.nodes(); ++i) {
    int q = 1;
    const auto parents = parent_list(structure, i);
    for (int p : parents) q *= arities[static_cast<std::size_t>(p)];
    if (static_cast<int>(cpt[static_cast<std::size_t>(i)].size()) != q)
      throw DataError("generating network: CPT of Z" + std::to_string(i + 1) +
                      " has the wrong number of parent states");
    for (const auto& row : cpt[static_cast<std::size_t>(i)]) {
      if (static_cast<int>(row.size()) != arities[static_cast<std::size_t>(i)])
        throw DataError("generating network: CPT row arity mismatch at Z" + std::to_string(i + 1));
      double s = 0.0;
      for (double p : row) s += p;
      if (std::abs(s - 1.0) > 1e-9)
        throw DataError("generating network: CPT row of Z" + std::to_string(i + 1) +
                        " does not sum to one");
    }
  }
}

int GroundTruthBn::draw_node(int node, const std::vector<int>& parent_order,
                             const std::uint8_t* row, RngStream& rng) const {
  const int k = parent_state_index(parent_order, arities, row);
  const auto& probs = cpt[static_cast<std::size_t>(node)][static_cast<std::size_t>(k)];
  double u = rng.uniform();
  for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
    if (u < probs[j]) return static_cast<int>(j) + 1;
    u -= probs[j];
  }
  return static_cast<int>(probs.size());
}

DiscreteDataset simulate_dataset(const GroundTruthBn& bn, std::int64_t rows,
                                 double intervention_fraction, RngStream& rng) {
  if (intervention_fraction < 0.0 || intervention_fraction > 1.0)
    throw ConfigError("intervention fraction must lie in [0, 1]");
  bn.check();
  const int m = bn.structure.nodes();
  const auto order = topological_order(bn.structure);
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) parents[static_cast<std::size_t>(i)] = parent_list(bn.structure, i);

  DiscreteDataset data;
  data.nodes = m;
  data.arities = bn.arities;
  data.values.assign(static_cast<std::size_t>(rows) * m, 1);
  data.intervened.assign(static_cast<std::size_t>(rows) * m, 0);

  const std::int64_t interventional =
      static_cast<std::int64_t>(std::ceil(intervention_fraction * static_cast<double>(rows)));
  for (std::int64_t r = 0; r < rows; ++r) {
    std::uint8_t* row = data.values.data() + static_cast<std::size_t>(r) * m;
    int clamped = -1;
    if (r < interventional) {
      clamped = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)));
      row[clamped] = static_cast<std::uint8_t>(
          1 + rng.uniform_int(static_cast<std::uint64_t>(bn.arities[static_cast<std::size_t>(clamped)])));
      data.intervened[static_cast<std::size_t>(r) * m + clamped] = 1;
    }
    sample_row(bn, order, parents, row, clamped, rng);
  }
  return data;
}

DiscreteDataset simulate_condition_dataset(const GroundTruthBn& bn, std::int64_t rows_per_condition,
                                           const std::vector<int>& intervened_node_per_condition,
                                           RngStream& rng) {
  bn.check();
  const int m = bn.structure.nodes();
  const auto order = topological_order(bn.structure);
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) parents[static_cast<std::size_t>(i)] = parent_list(bn.structure, i);

  const std::int64_t rows =
      rows_per_condition * static_cast<std::int64_t>(intervened_node_per_condition.size());
  DiscreteDataset data;
  data.nodes = m;
  data.arities = bn.arities;
  data.values.assign(static_cast<std::size_t>(rows) * m, 1);
  data.intervened.assign(static_cast<std::size_t>(rows) * m, 0);
  data.conditions.reserve(static_cast<std::size_t>(rows));

  std::int64_t r = 0;
  for (std::size_t c = 0; c < intervened_node_per_condition.size(); ++c) {
    const int target = intervened_node_per_condition[c];
    if (target < 0 || target >= m) throw ConfigError("intervened node out of range");
    for (std::int64_t i = 0; i < rows_per_condition; ++i, ++r) {
      std::uint8_t* row = data.values.data() + static_cast<std::size_t>(r) * m;
      row[target] = static_cast<std::uint8_t>(
          1 + rng.uniform_int(static_cast<std::uint64_t>(bn.arities[static_cast<std::size_t>(target)])));
      data.intervened[static_cast<std::size_t>(r) * m + target] = 1;
      data.conditions.push_back(std::to_string(c + 1));
      sample_row(bn, order, parents, row, target, rng);
    }
  }
  return data;
}

GroundTruthBn make_chain6_network() {
  GroundTruthBn bn;
  bn.structure = Dag(6, 4);
  for (int i = 0; i + 1 < 6; ++i) bn.structure.add_edge(i, i + 1);
  bn.arities.assign(6, 2);
  bn.cpt.resize(6);
  bn.cpt[0] = {{0.5, 0.5}};
  for (int i = 1; i < 6; ++i) bn.cpt[static_cast<std::size_t>(i)] = {{0.75, 0.25}, {0.25, 0.75}};
  bn.check();
  return bn;
}

GroundTruthBn make_example6_network() {
  // Branching structure with one collider (Z4 <- {Z1, Z3}) and a three-edge
  // chain segment Z1 -> Z2 -> Z5 -> Z6; interventions on Z4's parents leave
  // Z4 insensitive to the remaining variables.
  GroundTruthBn bn;
  bn.structure = Dag(6, 4);
  bn.structure.add_edge(0, 1);  // Z1 -> Z2
  bn.structure.add_edge(1, 4);  // Z2 -> Z5
  bn.structure.add_edge(4, 5);  // Z5 -> Z6
  bn.structure.add_edge(0, 2);  // Z1 -> Z3
  bn.structure.add_edge(2, 3);  // Z3 -> Z4
  bn.structure.add_edge(0, 3);  // Z1 -> Z4
  bn.arities.assign(6, 2);
  bn.cpt.resize(6);
  bn.cpt[0] = {{0.5, 0.5}};
  const std::vector<double> same{0.75, 0.25};
  const std::vector<double> flip{0.25, 0.75};
  bn.cpt[1] = {{0.75, 0.25}, {0.25, 0.75}};
  bn.cpt[2] = {same, flip};
  bn.cpt[4] = {{0.75, 0.25}, {0.25, 0.75}};
  bn.cpt[5] = {{0.75, 0.25}, {0.25, 0.75}};
  // Collider table indexed with the lower-id parent fastest:
  // P(state 2) rises with the number of active parents.
  bn.cpt[3] = {{0.8, 0.2}, {0.5, 0.5}, {0.5, 0.5}, {0.2, 0.8}};
  bn.check();
  return bn;
}

GroundTruthBn make_synth11_network() {
  GroundTruthBn bn;
  bn.structure = Dag(11, 4);
  const int edges[][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {2, 4},  {3, 5}, {4, 5},
                          {5, 6}, {6, 7}, {5, 8}, {8, 9}, {7, 9},  {1, 10}, {9, 10}};
  for (const auto& e : edges) bn.structure.add_edge(e[0], e[1]);
  bn.arities.assign(11, 3);
  bn.cpt.resize(11);
  RngStream rng(0xC0FFEE5EEDULL);  // fixed tables, part of the study design
  for (int i = 0; i < 11; ++i) {
    int q = 1;
    std::uint32_t ps = bn.structure.parent_mask(i);
    while (ps) {
      q *= 3;
      ps &= ps - 1;
    }
    bn.cpt[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) bn.cpt[static_cast<std::size_t>(i)].push_back(random_cpt_row(3, rng));
  }
  bn.check();
  return bn;
}

GroundTruthBn make_preset_network(const std::string& name) {
  if (name == "chain6") return make_chain6_network();
  if (name == "example6") return make_example6_network();
  if (name == "synth11") return make_synth11_network();
  throw ConfigError("unknown network preset: " + name + " (chain6, example6, synth11)");
}

}  // namespace md
