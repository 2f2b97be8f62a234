#include "mdsampler/continuous/descent.hpp"

#include <cmath>
#include <string>

#include "mdsampler/errors.hpp"

namespace md {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

std::vector<double> gradient_descent_mode(const ContinuousTarget& target,
                                          std::span<const double> start,
                                          const DescentOptions& options) {
  const std::size_t m = start.size();
  std::vector<double> x(start.begin(), start.end());
  std::vector<double> grad(m), trial(m);
  double fx = target.log_density(x);
  if (!std::isfinite(fx)) throw DescentError("descent started at a point with non-finite log density");

  for (int it = 0; it < options.max_iterations; ++it) {
    target.gradient(x, grad);
    const double gnorm = norm2(grad);
    if (gnorm < options.gradient_tol) return x;

    // Cap each coordinate's displacement so one ascent step cannot hop over a
    // basin boundary.
    double step = options.initial_step;
    const double ginf = norm_inf(grad);
    if (ginf * step > options.max_coord_step) step = options.max_coord_step / ginf;

    const double slope = gnorm * gnorm;
    bool moved = false;
    while (step > 1e-14) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = x[i] + step * grad[i];
      const double ft = target.log_density(trial);
      // Strict improvement required: at the rounding floor of the objective
      // the Armijo term underflows and equality would loop forever.
      if (std::isfinite(ft) && ft > fx && ft >= fx + options.armijo_c1 * step * slope) {
        x.swap(trial);
        fx = ft;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      // Line search stalled at the floating-point floor of the objective.
      if (gnorm <= options.stall_tol) return x;
      throw DescentError("gradient descent stalled with gradient norm " + std::to_string(gnorm));
    }
  }
  throw DescentError("gradient descent exhausted its iteration budget");
}

}  // namespace md
