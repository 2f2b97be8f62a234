#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mdsampler/grid.hpp"

namespace md {

// One entry of a domain-based representation: the estimated probability mass
// of domain k and the conditional expectation of the payload on it.
struct DrEntry {
  double lambda = 0.0;
  std::vector<double> mu;
  bool mu_defined = false;
  std::int64_t samples = 0;
};

struct DomainRepresentation {
  std::vector<DrEntry> entries;    // k = 0..M
  std::vector<double> overall_mu;  // sum_k lambda_k mu_k over visited domains
  std::size_t payload_rows = 1;
  std::size_t payload_cols = 1;
};

// Importance-weighted sums behind the DR estimators. Each accumulated sample
// contributes exp(w) at its visited cell, taken from the weight matrix before
// that iteration's update. Weights are shifted by a running offset so the
// exponentials stay representable; all derived quantities are ratios and are
// invariant to the shift.
class DrAccumulator {
 public:
  DrAccumulator() = default;
  DrAccumulator(int domains, std::size_t payload_rows, std::size_t payload_cols);

  int domains() const { return domains_; }
  std::size_t payload_size() const { return rows_ * cols_; }
  std::size_t payload_rows() const { return rows_; }
  std::size_t payload_cols() const { return cols_; }
  std::int64_t total_samples() const { return total_samples_; }

  // log_cell_weight = w^t at the sample's cell. Throws NumericalError on a
  // non-finite payload.
  void accumulate(int k, double log_cell_weight, std::span<const double> payload);

  // Associative, commutative fold for combining chains that share a frozen
  // registry and ladder.
  void merge(const DrAccumulator& other);

  DomainRepresentation finalize() const;  // throws on an empty accumulator

  double mass(int k) const { return s1_[static_cast<std::size_t>(k)]; }
  double offset() const { return offset_; }

 private:
  void rescale(double new_offset);

  int domains_ = 0;
  std::size_t rows_ = 1, cols_ = 1;
  std::vector<double> s1_;       // per-domain weighted mass
  std::vector<double> sh_;      // per-domain weighted payload sums
  std::vector<std::int64_t> n_;  // raw per-domain sample counts
  std::int64_t total_samples_ = 0;
  double offset_ = 0.0;
  bool offset_set_ = false;
};

// Payload extractor attached to a sampler run; out has rows*cols slots.
template <class State>
struct PayloadBinding {
  std::string name;
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::function<void(const State&, std::span<double>)> fill;
};

}  // namespace md
