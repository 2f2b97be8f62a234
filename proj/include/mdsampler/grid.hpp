#pragma once

#include <cstdint>
#include <vector>

namespace md {

// Cell of the double partition: k = domain index (0..M, 0 = outside recorded
// domains), j = density level index (1..L, 1 = highest density band).
struct Cell {
  int k = 0;
  int j = 1;
  bool operator==(const Cell&) const = default;
};

// Decreasing, evenly spaced log-density cut points H_1 > ... > H_{L-1}.
// Level j covers log densities in [H_j, H_{j-1}) with H_0 = +inf, H_L = -inf.
class DensityLadder {
 public:
  DensityLadder() = default;
  // Anchors H_1 at `top` and steps down by `spacing`.
  DensityLadder(int levels, double spacing, double top);

  int levels() const { return levels_; }
  double spacing() const { return spacing_; }
  // Cut point H_j for j in 1..L-1.
  double cut(int j) const { return cuts_[static_cast<std::size_t>(j - 1)]; }

  // Density partition index J(x) for the given log density.
  int level(double log_density) const;

  // Moves every cut point up by one spacing unit.
  void shift_up();

 private:
  int levels_ = 0;
  double spacing_ = 0.0;
  std::vector<double> cuts_;
};

enum class Variant { md, md0, wl };

// Log-weights and visit bookkeeping over the (K*+1) x L grid. Rows beyond the
// current number of registered modes stay zero until used. j is 1-based
// throughout, matching the ladder.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(int max_domains, int levels);

  int rows() const { return rows_; }
  int levels() const { return levels_; }

  double w(int k, int j) const { return w_[idx(k, j)]; }
  double& w(int k, int j) { return w_[idx(k, j)]; }
  std::int64_t counter(int k, int j) const { return c_[idx(k, j)]; }
  bool occupied(int k, int j) const { return occ_[idx(k, j)] != 0; }
  bool checked(int k, int j) const { return checked_[idx(k, j)] != 0; }
  std::int64_t visits(int k, int j) const { return visits_[idx(k, j)]; }

  // Records one visit: weight bump by gamma plus counter/occupancy updates.
  // The WL variant bumps the whole column (all k at the visited j) and tracks
  // counters per level only.
  void record_visit(const Cell& cell, double gamma, Variant variant, int active_domains);

  // Clears the round counters and snapshots the occupied set as the cells
  // the next uniformity round is judged on. Cells discovered mid-round join
  // the check from the following reset.
  void reset_counters() {
    std::fill(c_.begin(), c_.end(), 0);
    checked_ = occ_;
  }
  void reset_visits() { std::fill(visits_.begin(), visits_.end(), 0); }

  // Mode replacement fold: row s merges into row 0 (count semantics) and is
  // zeroed for the incoming mode. No-op on weights in the WL variant, where
  // rows are kept identical.
  void fold_row_into_residual(int s, Variant variant);

  // New-mode row for index k. WL copies the shared column weights so rows
  // stay identical; MD rows are already zero.
  void init_row(int k, Variant variant);

  // Ladder shift cascade: per row, bottom level absorbs its neighbor, all
  // levels slide down one slot, top level clears.
  void cascade_down();

  // Uniformity statistics over the checked cells: returns {max |c - cbar|,
  // cbar}; cbar = 0 when the checked set is empty.
  std::pair<double, double> counter_spread(Variant variant, int active_domains) const;

  double total_weight(int k) const;

 private:
  std::size_t idx(int k, int j) const { return static_cast<std::size_t>(k) * levels_ + (j - 1); }

  int rows_ = 0;
  int levels_ = 0;
  std::vector<double> w_;
  std::vector<std::int64_t> c_;
  std::vector<std::uint8_t> occ_;
  std::vector<std::uint8_t> checked_;
  std::vector<std::int64_t> visits_;
};

}  // namespace md
