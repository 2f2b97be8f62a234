#include "mdsampler/estimation.hpp"

#include <cmath>
#include <functional>

#include "mdsampler/errors.hpp"

namespace md {

namespace {
// Rescale before exp(w - offset) exceeds ~1e130.
constexpr double kShiftTrigger = 300.0;
}  // namespace

DrAccumulator::DrAccumulator(int domains, std::size_t payload_rows, std::size_t payload_cols)
    : domains_(domains), rows_(payload_rows), cols_(payload_cols) {
  const std::size_t d = static_cast<std::size_t>(domains);
  s1_.assign(d, 0.0);
  sh_.assign(d * rows_ * cols_, 0.0);
  n_.assign(d, 0);
}

void DrAccumulator::rescale(double new_offset) {
  const double factor = std::exp(offset_ - new_offset);
  for (auto& v : s1_) v *= factor;
  for (auto& v : sh_) v *= factor;
  offset_ = new_offset;
}

void DrAccumulator::accumulate(int k, double log_cell_weight, std::span<const double> payload) {
  if (payload.size() != payload_size())
    throw NumericalError("payload size mismatch in DR accumulator");
  for (double v : payload)
    if (!std::isfinite(v)) throw NumericalError("non-finite payload in DR accumulator");
  if (!offset_set_) {
    offset_ = log_cell_weight;
    offset_set_ = true;
  } else if (log_cell_weight - offset_ > kShiftTrigger) {
    rescale(log_cell_weight);
  }
  const double e = std::exp(log_cell_weight - offset_);
  const std::size_t ku = static_cast<std::size_t>(k);
  s1_[ku] += e;
  double* row = sh_.data() + ku * payload_size();
  for (std::size_t i = 0; i < payload.size(); ++i) row[i] += e * payload[i];
  n_[ku] += 1;
  total_samples_ += 1;
}

void DrAccumulator::merge(const DrAccumulator& other) {
  if (other.total_samples_ == 0) return;
  if (domains_ != other.domains_ || rows_ != other.rows_ || cols_ != other.cols_)
    throw NumericalError("cannot merge DR accumulators of different shapes");
  if (!offset_set_) {
    *this = other;
    return;
  }
  DrAccumulator rhs = other;
  const double common = std::max(offset_, rhs.offset_);
  rescale(common);
  rhs.rescale(common);
  for (std::size_t i = 0; i < s1_.size(); ++i) s1_[i] += rhs.s1_[i];
  for (std::size_t i = 0; i < sh_.size(); ++i) sh_[i] += rhs.sh_[i];
  for (std::size_t i = 0; i < n_.size(); ++i) n_[i] += rhs.n_[i];
  total_samples_ += rhs.total_samples_;
}

DomainRepresentation DrAccumulator::finalize() const {
  if (total_samples_ == 0) throw NumericalError("cannot finalize an empty DR accumulator");
  DomainRepresentation dr;
  dr.payload_rows = rows_;
  dr.payload_cols = cols_;
  dr.entries.resize(static_cast<std::size_t>(domains_));
  double total = 0.0;
  for (double v : s1_) total += v;
  dr.overall_mu.assign(payload_size(), 0.0);
  for (int k = 0; k < domains_; ++k) {
    const std::size_t ku = static_cast<std::size_t>(k);
    DrEntry& e = dr.entries[ku];
    e.samples = n_[ku];
    e.lambda = (total > 0.0) ? s1_[ku] / total : 0.0;
    // A domain whose every contribution underflowed the shared offset carries
    // no usable conditional information; flag it like an unvisited one.
    if (n_[ku] > 0 && s1_[ku] > 0.0) {
      e.mu_defined = true;
      e.mu.resize(payload_size());
      const double* row = sh_.data() + ku * payload_size();
      for (std::size_t i = 0; i < payload_size(); ++i) e.mu[i] = row[i] / s1_[ku];
      for (std::size_t i = 0; i < payload_size(); ++i) dr.overall_mu[i] += e.lambda * e.mu[i];
    }
  }
  return dr;
}

}  // namespace md
