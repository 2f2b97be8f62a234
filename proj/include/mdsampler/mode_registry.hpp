#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace md {

template <class State>
struct ModeEntry {
  State mode;
  double log_density = 0.0;
  std::vector<double> stat;  // per-domain adaptive statistic V_k
};

// Ordered list of recorded local modes, indices 1..M. Index 0 always means
// "outside the recorded domains" and has no entry.
template <class State>
class ModeRegistry {
 public:
  ModeRegistry() = default;
  explicit ModeRegistry(int cap) : cap_(cap) {}

  int capacity() const { return cap_; }
  int size() const { return static_cast<int>(modes_.size()); }

  const ModeEntry<State>& entry(int k) const { return modes_[static_cast<std::size_t>(k - 1)]; }
  ModeEntry<State>& entry(int k) { return modes_[static_cast<std::size_t>(k - 1)]; }

  // Registry index of the given mode, or 0 if absent. A cheap log-density
  // prefilter avoids most full state comparisons.
  template <class EqualFn>
  int find(const State& mode, double log_density, EqualFn&& equal) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (std::abs(modes_[i].log_density - log_density) > 1e-6) continue;
      if (equal(modes_[i].mode, mode)) return static_cast<int>(i + 1);
    }
    return 0;
  }

  // Appends a new mode; caller has checked size() < capacity().
  int append(State mode, double log_density, std::vector<double> stat) {
    modes_.push_back({std::move(mode), log_density, std::move(stat)});
    return static_cast<int>(modes_.size());
  }

  // Index of the lowest-density registered mode.
  int lowest() const {
    int s = 1;
    for (int k = 2; k <= size(); ++k)
      if (modes_[static_cast<std::size_t>(k - 1)].log_density < modes_[static_cast<std::size_t>(s - 1)].log_density) s = k;
    return s;
  }

  void replace(int k, State mode, double log_density, std::vector<double> stat) {
    modes_[static_cast<std::size_t>(k - 1)] = {std::move(mode), log_density, std::move(stat)};
  }

  double max_log_density() const {
    double u = -1e308;
    for (const auto& e : modes_)
      if (e.log_density > u) u = e.log_density;
    return u;
  }

 private:
  int cap_ = 1;
  std::vector<ModeEntry<State>> modes_;
};

}  // namespace md
