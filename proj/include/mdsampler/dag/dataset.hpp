#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace md {

// Discrete observations with per-cell intervention flags. Values are 1-based
// states; a flagged value was fixed experimentally and must not enter its own
// node's sufficient statistics (it still serves as parent evidence).
struct DiscreteDataset {
  int nodes = 0;
  std::vector<int> arities;                 // r_i, size nodes
  std::vector<std::uint8_t> values;         // row-major, rows x nodes, 1..r_i
  std::vector<std::uint8_t> intervened;     // row-major mask
  std::vector<std::string> conditions;      // optional per-row labels

  std::int64_t rows() const {
    return nodes == 0 ? 0 : static_cast<std::int64_t>(values.size()) / nodes;
  }
  int value(std::int64_t row, int node) const {
    return values[static_cast<std::size_t>(row) * nodes + node];
  }
  bool is_intervened(std::int64_t row, int node) const {
    return intervened[static_cast<std::size_t>(row) * nodes + node] != 0;
  }

  void check() const;  // throws DataError on inconsistent shapes or values
  DiscreteDataset subset(const std::vector<std::int64_t>& row_ids) const;
  std::uint64_t digest() const;
};

// Joint parent-state index: mixed radix over the parents in increasing node
// order, first parent fastest. Shared by scoring, simulation and prediction.
int parent_state_index(const std::vector<int>& parents, const std::vector<int>& arities,
                       const std::uint8_t* row_values);

struct FamilyCounts {
  int child = 0;
  std::vector<int> parents;
  int child_arity = 0;   // r_i
  int parent_states = 0; // q_i
  std::vector<std::int64_t> n;  // n[k * r + (j-1)]
  std::int64_t total = 0;
};

// Counts N_ijk for one (child, parent set) family. Rows where the child is
// intervened are excluded.
FamilyCounts count_family(const DiscreteDataset& data, int child, std::uint32_t parent_mask);

}  // namespace md
