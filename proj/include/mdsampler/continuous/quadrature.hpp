#pragma once

#include <functional>
#include <span>
#include <vector>

namespace md {

// Exact domain-based representations for separable targets, built from
// one-dimensional adaptive quadrature. The per-coordinate density is analyzed
// once; m-dimensional masses and conditional means are products and quotients
// of the one-dimensional factors.

using Fn1D = std::function<double(double)>;

double adaptive_simpson(const Fn1D& f, double a, double b, double abs_tol);

struct OneDimBasin {
  double mode = 0.0;
  double lo = 0.0;   // basin interval (separators or scan bounds)
  double hi = 0.0;
  double mass = 0.0;  // integral of exp(log density) over [lo, hi]
  double mean = 0.0;  // conditional mean on the basin
};

struct OneDimAnalysis {
  std::vector<OneDimBasin> basins;     // ordered by mode location
  std::vector<double> separators;      // interior basin boundaries
  double total_mass = 0.0;
  double bound_lo = 0.0, bound_hi = 0.0;

  // Index of the basin containing x (flow classification by separators).
  int classify(double x) const;
};

// Locates modes and separators of the one-dimensional density by bisection on
// its derivative over [lo, hi], then integrates each basin.
// log_density/derivative refer to log p1; derivative roots alternate between
// separators (maxima of -log p1) and modes.
OneDimAnalysis analyze_coordinate(const Fn1D& log_density, const Fn1D& derivative, double lo,
                                  double hi, double quad_tol = 1e-12);

struct OracleDomain {
  std::vector<int> pattern;   // per-coordinate basin index
  double lambda = 0.0;
  std::vector<double> mean;   // per-coordinate conditional mean
};

struct ProductOracle {
  int dimension = 0;
  OneDimAnalysis coordinate;
  std::vector<OracleDomain> domains;  // all basin tuples, lexicographic

  // Domain index for a point, or -1 when a coordinate sits on a boundary.
  int classify(std::span<const double> x) const;
  // Domain index for a mode location (nearest basin mode per coordinate).
  int classify_mode(std::span<const double> mode, double tol) const;
};

ProductOracle product_target_oracle(const OneDimAnalysis& coordinate, int dimension);

// Unconditional expectation of a separable per-coordinate factor:
// E[f(X_1)] under the normalized one-dimensional density.
double expect_coordinate(const Fn1D& log_density, const Fn1D& f, const OneDimAnalysis& analysis,
                         double quad_tol = 1e-12);

// Convenience wrapper for the Rastrigin benchmark target.
ProductOracle rastrigin_oracle(int dimension, double amplitude, double quad_tol = 1e-12);

}  // namespace md
