#include "mdsampler/continuous/quadrature.hpp"

#include <cmath>
#include <span>

#include "mdsampler/errors.hpp"

namespace md {

namespace {

constexpr double kPi = 3.14159265358979323846;

double simpson_rec(const Fn1D& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw NumericalError("adaptive quadrature failed to converge");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

}  // namespace

double adaptive_simpson(const Fn1D& f, double a, double b, double abs_tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, 60);
}

int OneDimAnalysis::classify(double x) const {
  int idx = 0;
  for (double s : separators) {
    if (x > s)
      ++idx;
    else
      break;
  }
  return idx;
}

OneDimAnalysis analyze_coordinate(const Fn1D& log_density, const Fn1D& derivative, double lo,
                                  double hi, double quad_tol) {
  OneDimAnalysis out;
  out.bound_lo = lo;
  out.bound_hi = hi;

  // Bracket every sign change of d/dx log p1 on a fine grid, bisect each root
  // and classify it by the derivative's sign flip.
  const double step = 0.01;
  std::vector<double> modes;
  double x_prev = lo;
  double d_prev = derivative(lo);
  for (double x = lo + step; x <= hi + 0.5 * step; x += step) {
    const double d = derivative(x);
    if (d_prev == 0.0 || (d_prev > 0.0) != (d > 0.0)) {
      double a = x_prev, b = x, da = d_prev;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double dm = derivative(m);
        if ((dm > 0.0) == (da > 0.0)) {
          a = m;
          da = dm;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      if (d_prev > 0.0)
        modes.push_back(root);  // log p1 rises then falls: a mode
      else
        out.separators.push_back(root);
    }
    x_prev = x;
    d_prev = d;
  }
  if (modes.empty()) throw NumericalError("no mode found for the separable coordinate");
  if (out.separators.size() + 1 != modes.size())
    throw NumericalError("modes and basin boundaries do not alternate");

  const auto density = [&](double x) { return std::exp(log_density(x)); };
  for (std::size_t i = 0; i < modes.size(); ++i) {
    OneDimBasin basin;
    basin.mode = modes[i];
    basin.lo = (i == 0) ? lo : out.separators[i - 1];
    basin.hi = (i + 1 == modes.size()) ? hi : out.separators[i];
    basin.mass = adaptive_simpson(density, basin.lo, basin.hi, quad_tol);
    const double first = adaptive_simpson([&](double x) { return x * density(x); }, basin.lo,
                                          basin.hi, quad_tol);
    basin.mean = first / basin.mass;
    out.total_mass += basin.mass;
    out.basins.push_back(basin);
  }
  return out;
}

int ProductOracle::classify(std::span<const double> x) const {
  const int b = static_cast<int>(coordinate.basins.size());
  int idx = 0;
  for (double v : x) idx = idx * b + coordinate.classify(v);
  return idx;
}

int ProductOracle::classify_mode(std::span<const double> mode, double tol) const {
  const int b = static_cast<int>(coordinate.basins.size());
  int idx = 0;
  for (double v : mode) {
    int best = -1;
    for (int i = 0; i < b; ++i)
      if (std::abs(v - coordinate.basins[static_cast<std::size_t>(i)].mode) <= tol) best = i;
    if (best < 0) return -1;
    idx = idx * b + best;
  }
  return idx;
}

ProductOracle product_target_oracle(const OneDimAnalysis& coordinate, int dimension) {
  ProductOracle oracle;
  oracle.dimension = dimension;
  oracle.coordinate = coordinate;
  const int b = static_cast<int>(coordinate.basins.size());
  std::size_t count = 1;
  for (int i = 0; i < dimension; ++i) count *= static_cast<std::size_t>(b);
  oracle.domains.resize(count);
  for (std::size_t d = 0; d < count; ++d) {
    OracleDomain& dom = oracle.domains[d];
    dom.pattern.resize(static_cast<std::size_t>(dimension));
    std::size_t rest = d;
    for (int i = dimension - 1; i >= 0; --i) {
      dom.pattern[static_cast<std::size_t>(i)] = static_cast<int>(rest % b);
      rest /= b;
    }
    dom.lambda = 1.0;
    dom.mean.resize(static_cast<std::size_t>(dimension));
    for (int i = 0; i < dimension; ++i) {
      const auto& basin = coordinate.basins[static_cast<std::size_t>(dom.pattern[static_cast<std::size_t>(i)])];
      dom.lambda *= basin.mass / coordinate.total_mass;
      dom.mean[static_cast<std::size_t>(i)] = basin.mean;
    }
  }
  return oracle;
}

double expect_coordinate(const Fn1D& log_density, const Fn1D& f, const OneDimAnalysis& analysis,
                         double quad_tol) {
  const double num = adaptive_simpson(
      [&](double x) { return f(x) * std::exp(log_density(x)); }, analysis.bound_lo,
      analysis.bound_hi, quad_tol);
  return num / analysis.total_mass;
}

ProductOracle rastrigin_oracle(int dimension, double amplitude, double quad_tol) {
  const auto log_density = [amplitude](double x) {
    return -(x * x + amplitude * (1.0 - std::cos(kPi * x)));
  };
  const auto derivative = [amplitude](double x) {
    return -(2.0 * x + amplitude * kPi * std::sin(kPi * x));
  };
  const auto coordinate = analyze_coordinate(log_density, derivative, -26.0, 26.0, quad_tol);
  return product_target_oracle(coordinate, dimension);
}

}  // namespace md
