#include "mdsampler/continuous/target.hpp"

#include <cmath>

namespace md {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double rastrigin_log_density(std::span<const double> x, double amplitude) {
  double sum_sq = 0.0;
  double sum_cos = 0.0;
  for (double v : x) {
    sum_sq += v * v;
    sum_cos += std::cos(kPi * v);
  }
  const double r = sum_sq + amplitude * (static_cast<double>(x.size()) - sum_cos);
  return -r;
}

double RastriginTarget::log_density(std::span<const double> x) const {
  return rastrigin_log_density(x, amplitude_);
}

void RastriginTarget::gradient(std::span<const double> x, std::span<double> grad_out) const {
  // d log p / dx_i = -(2 x_i + A pi sin(pi x_i))
  for (std::size_t i = 0; i < x.size(); ++i)
    grad_out[i] = -(2.0 * x[i] + amplitude_ * kPi * std::sin(kPi * x[i]));
}

}  // namespace md
