#include "mdsampler/dag/dataset.hpp"

#include <bit>

#include "mdsampler/errors.hpp"

namespace md {

void DiscreteDataset::check() const {
  if (nodes < 1) throw DataError("dataset has no variables");
  if (static_cast<int>(arities.size()) != nodes) throw DataError("arity count does not match node count");
  if (values.size() != intervened.size()) throw DataError("value and intervention shapes differ");
  if (values.size() % static_cast<std::size_t>(nodes) != 0)
    throw DataError("value buffer is not a whole number of rows");
  if (!conditions.empty() && static_cast<std::int64_t>(conditions.size()) != rows())
    throw DataError("condition labels do not match the row count");
  for (std::int64_t r = 0; r < rows(); ++r) {
    for (int i = 0; i < nodes; ++i) {
      const int v = value(r, i);
      if (v < 1 || v > arities[static_cast<std::size_t>(i)])
        throw DataError("row " + std::to_string(r + 1) + ", variable Z" + std::to_string(i + 1) +
                        ": state " + std::to_string(v) + " outside 1.." +
                        std::to_string(arities[static_cast<std::size_t>(i)]));
    }
  }
}

DiscreteDataset DiscreteDataset::subset(const std::vector<std::int64_t>& row_ids) const {
  DiscreteDataset out;
  out.nodes = nodes;
  out.arities = arities;
  out.values.reserve(row_ids.size() * static_cast<std::size_t>(nodes));
  out.intervened.reserve(row_ids.size() * static_cast<std::size_t>(nodes));
  if (!conditions.empty()) out.conditions.reserve(row_ids.size());
  for (std::int64_t r : row_ids) {
    const std::size_t base = static_cast<std::size_t>(r) * nodes;
    out.values.insert(out.values.end(), values.begin() + base, values.begin() + base + nodes);
    out.intervened.insert(out.intervened.end(), intervened.begin() + base,
                          intervened.begin() + base + nodes);
    if (!conditions.empty()) out.conditions.push_back(conditions[static_cast<std::size_t>(r)]);
  }
  return out;
}

std::uint64_t DiscreteDataset::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(nodes));
  for (int a : arities) mix(static_cast<std::uint64_t>(a));
  for (std::size_t i = 0; i < values.size(); ++i)
    mix(static_cast<std::uint64_t>(values[i]) | (static_cast<std::uint64_t>(intervened[i]) << 8));
  return h;
}

int parent_state_index(const std::vector<int>& parents, const std::vector<int>& arities,
                       const std::uint8_t* row_values) {
  int idx = 0;
  int stride = 1;
  for (int p : parents) {
    idx += (row_values[p] - 1) * stride;
    stride *= arities[static_cast<std::size_t>(p)];
  }
  return idx;
}

FamilyCounts count_family(const DiscreteDataset& data, int child, std::uint32_t parent_mask) {
  FamilyCounts fc;
  fc.child = child;
  std::uint32_t ps = parent_mask;
  while (ps) {
    const int p = std::countr_zero(ps);
    ps &= ps - 1;
    fc.parents.push_back(p);
  }
  fc.child_arity = data.arities[static_cast<std::size_t>(child)];
  fc.parent_states = 1;
  for (int p : fc.parents) fc.parent_states *= data.arities[static_cast<std::size_t>(p)];
  fc.n.assign(static_cast<std::size_t>(fc.parent_states) * fc.child_arity, 0);

  const std::int64_t rows = data.rows();
  for (std::int64_t r = 0; r < rows; ++r) {
    const std::uint8_t* row = data.values.data() + static_cast<std::size_t>(r) * data.nodes;
    if (data.is_intervened(r, child)) continue;
    const int k = parent_state_index(fc.parents, data.arities, row);
    const int j = row[child];
    fc.n[static_cast<std::size_t>(k) * fc.child_arity + (j - 1)] += 1;
    fc.total += 1;
  }
  return fc;
}

}  // namespace md
