#include "mdsampler/grid.hpp"

#include <algorithm>
#include <cmath>

#include "mdsampler/errors.hpp"

namespace md {

DensityLadder::DensityLadder(int levels, double spacing, double top)
    : levels_(levels), spacing_(spacing) {
  if (levels < 2) throw ConfigError("density ladder needs L >= 2");
  if (!(spacing > 0.0)) throw ConfigError("density ladder needs spacing > 0");
  cuts_.resize(static_cast<std::size_t>(levels - 1));
  for (int j = 1; j <= levels - 1; ++j)
    cuts_[static_cast<std::size_t>(j - 1)] = top - spacing * (j - 1);
}

int DensityLadder::level(double log_density) const {
  // j - 1 cut points lie strictly above log p(x).
  int above = 0;
  for (double h : cuts_) {
    if (h > log_density)
      ++above;
    else
      break;
  }
  return above + 1;
}

void DensityLadder::shift_up() {
  for (auto& h : cuts_) h += spacing_;
}

WeightMatrix::WeightMatrix(int max_domains, int levels)
    : rows_(max_domains + 1), levels_(levels) {
  const std::size_t n = static_cast<std::size_t>(rows_) * levels_;
  w_.assign(n, 0.0);
  c_.assign(n, 0);
  occ_.assign(n, 0);
  checked_.assign(n, 0);
  visits_.assign(n, 0);
}

void WeightMatrix::record_visit(const Cell& cell, double gamma, Variant variant, int active_domains) {
  // The WL baseline bumps every domain row at the visited level, keeping the
  // rows identical; counters and occupancy always track the visited cell.
  if (variant == Variant::wl) {
    for (int k = 0; k <= active_domains; ++k) w_[idx(k, cell.j)] += gamma;
  } else {
    w_[idx(cell.k, cell.j)] += gamma;
  }
  c_[idx(cell.k, cell.j)] += 1;
  occ_[idx(cell.k, cell.j)] = 1;
  visits_[idx(cell.k, cell.j)] += 1;
}

void WeightMatrix::fold_row_into_residual(int s, Variant variant) {
  // The count fold applies to the recorded weights only in the MD variants;
  // WL keeps its rows identical, so the evicted row's weights stay as the
  // shared column values. Cell statistics fold either way.
  for (int j = 1; j <= levels_; ++j) {
    if (variant != Variant::wl) {
      w_[idx(0, j)] += w_[idx(s, j)];
      w_[idx(s, j)] = 0.0;
    }
    c_[idx(0, j)] += c_[idx(s, j)];
    occ_[idx(0, j)] |= occ_[idx(s, j)];
    checked_[idx(0, j)] |= checked_[idx(s, j)];
    c_[idx(s, j)] = 0;
    occ_[idx(s, j)] = 0;
    checked_[idx(s, j)] = 0;
    visits_[idx(0, j)] += visits_[idx(s, j)];
    visits_[idx(s, j)] = 0;
  }
}

void WeightMatrix::init_row(int k, Variant variant) {
  for (int j = 1; j <= levels_; ++j) {
    w_[idx(k, j)] = (variant == Variant::wl) ? w_[idx(0, j)] : 0.0;
    c_[idx(k, j)] = 0;
    occ_[idx(k, j)] = 0;
    checked_[idx(k, j)] = 0;
    visits_[idx(k, j)] = 0;
  }
}

void WeightMatrix::cascade_down() {
  for (int k = 0; k < rows_; ++k) {
    w_[idx(k, levels_)] += w_[idx(k, levels_ - 1)];
    c_[idx(k, levels_)] += c_[idx(k, levels_ - 1)];
    occ_[idx(k, levels_)] |= occ_[idx(k, levels_ - 1)];
    checked_[idx(k, levels_)] |= checked_[idx(k, levels_ - 1)];
    visits_[idx(k, levels_)] += visits_[idx(k, levels_ - 1)];
    for (int j = levels_ - 1; j >= 2; --j) {
      w_[idx(k, j)] = w_[idx(k, j - 1)];
      c_[idx(k, j)] = c_[idx(k, j - 1)];
      occ_[idx(k, j)] = occ_[idx(k, j - 1)];
      checked_[idx(k, j)] = checked_[idx(k, j - 1)];
      visits_[idx(k, j)] = visits_[idx(k, j - 1)];
    }
    w_[idx(k, 1)] = 0.0;
    c_[idx(k, 1)] = 0;
    occ_[idx(k, 1)] = 0;
    checked_[idx(k, 1)] = 0;
    visits_[idx(k, 1)] = 0;
  }
}

std::pair<double, double> WeightMatrix::counter_spread(Variant variant, int active_domains) const {
  (void)variant;
  std::int64_t total = 0;
  int n = 0;
  for (int k = 0; k <= active_domains; ++k) {
    for (int j = 1; j <= levels_; ++j) {
      if (!checked_[idx(k, j)]) continue;
      total += c_[idx(k, j)];
      ++n;
    }
  }
  if (n == 0) return {0.0, 0.0};
  const double cbar = static_cast<double>(total) / n;
  double dmax = 0.0;
  for (int k = 0; k <= active_domains; ++k) {
    for (int j = 1; j <= levels_; ++j) {
      if (!checked_[idx(k, j)]) continue;
      dmax = std::max(dmax, std::abs(static_cast<double>(c_[idx(k, j)]) - cbar));
    }
  }
  return {dmax, cbar};
}

double WeightMatrix::total_weight(int k) const {
  double s = 0.0;
  for (int j = 1; j <= levels_; ++j) s += w_[idx(k, j)];
  return s;
}

}  // namespace md
