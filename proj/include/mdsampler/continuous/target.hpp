#pragma once

#include <span>
#include <vector>

namespace md {

// Differentiable unnormalized log density on R^m with an analytic gradient.
class ContinuousTarget {
 public:
  virtual ~ContinuousTarget() = default;
  virtual int dimension() const = 0;
  virtual double log_density(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> grad_out) const = 0;
};

// log p(x) = -R(x) with R(x) = sum x_i^2 + A [m - sum cos(pi x_i)].
class RastriginTarget final : public ContinuousTarget {
 public:
  RastriginTarget(int dimension, double amplitude = 2.0)
      : dimension_(dimension), amplitude_(amplitude) {}

  int dimension() const override { return dimension_; }
  double log_density(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> grad_out) const override;
  double amplitude() const { return amplitude_; }

 private:
  int dimension_;
  double amplitude_;
};

double rastrigin_log_density(std::span<const double> x, double amplitude);

}  // namespace md
