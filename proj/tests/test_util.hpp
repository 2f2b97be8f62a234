#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "mdsampler/dag/dataset.hpp"
#include "mdsampler/rng.hpp"

namespace md::testing {

// Total variation distance between an empirical histogram and a probability
// vector over the same index set.
inline double total_variation(const std::map<int, std::int64_t>& counts,
                              const std::vector<double>& probs, std::int64_t n) {
  double tv = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto it = counts.find(static_cast<int>(i));
    const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    tv += std::abs(emp - probs[i]);
  }
  return 0.5 * tv;
}

// Upper tail of the chi-square distribution via the Wilson-Hilferty cube
// approximation; accurate enough for coarse uniformity gates.
inline double chi_square_upper_p(double statistic, int dof) {
  const double k = static_cast<double>(dof);
  const double z = (std::cbrt(statistic / k) - (1.0 - 2.0 / (9.0 * k))) / std::sqrt(2.0 / (9.0 * k));
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// Small hand-rolled dataset builder: rows as {z..., mask...}.
inline DiscreteDataset make_dataset(int nodes, std::vector<int> arities,
                                    const std::vector<std::vector<int>>& rows) {
  DiscreteDataset d;
  d.nodes = nodes;
  d.arities = std::move(arities);
  for (const auto& row : rows) {
    for (int i = 0; i < nodes; ++i) d.values.push_back(static_cast<std::uint8_t>(row[i]));
    for (int i = 0; i < nodes; ++i)
      d.intervened.push_back(static_cast<std::uint8_t>(row[static_cast<std::size_t>(nodes + i)]));
  }
  d.check();
  return d;
}

}  // namespace md::testing
