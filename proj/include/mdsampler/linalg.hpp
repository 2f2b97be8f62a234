#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace md {

// Small dense symmetric-matrix helpers for the low-dimensional covariance
// statistics used by the continuous instance. Matrices are row-major
// std::vector<double> of size m*m.

// Cholesky factorization A = L L^T, L lower triangular. Returns false if A is
// not (numerically) positive definite.
bool cholesky(std::span<const double> a, std::size_t m, std::vector<double>& lower);

// log det(A) from its Cholesky factor.
double log_det_from_cholesky(std::span<const double> lower, std::size_t m);

// Solve L y = b in place (forward substitution).
void forward_solve(std::span<const double> lower, std::size_t m, std::vector<double>& b);

// Log density of N(mean, scale * A) at x, where lower is chol(A).
double mvn_log_density(std::span<const double> x, std::span<const double> mean,
                       std::span<const double> lower, std::size_t m, double scale);

// Draw from N(mean, scale * A) given lower = chol(A).
std::vector<double> mvn_sample(std::span<const double> mean, std::span<const double> lower,
                               std::size_t m, double scale, class RngStream& rng);

// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
std::vector<double> symmetric_eigenvalues(std::span<const double> a, std::size_t m);

// log(sum_i exp(v_i)) with max shift; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

}  // namespace md
