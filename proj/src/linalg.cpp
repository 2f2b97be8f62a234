#include "mdsampler/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdsampler/rng.hpp"

namespace md {

bool cholesky(std::span<const double> a, std::size_t m, std::vector<double>& lower) {
  lower.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * m + j];
      for (std::size_t k = 0; k < j; ++k) s -= lower[i * m + k] * lower[j * m + k];
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) return false;
        lower[i * m + i] = std::sqrt(s);
      } else {
        lower[i * m + j] = s / lower[j * m + j];
      }
    }
  }
  return true;
}

double log_det_from_cholesky(std::span<const double> lower, std::size_t m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += std::log(lower[i * m + i]);
  return 2.0 * s;
}

void forward_solve(std::span<const double> lower, std::size_t m, std::vector<double>& b) {
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower[i * m + k] * b[k];
    b[i] = s / lower[i * m + i];
  }
}

double mvn_log_density(std::span<const double> x, std::span<const double> mean,
                       std::span<const double> lower, std::size_t m, double scale) {
  static const double kLog2Pi = 1.8378770664093454836;
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) d[i] = x[i] - mean[i];
  forward_solve(lower, m, d);
  double quad = 0.0;
  for (double v : d) quad += v * v;
  quad /= scale;
  const double log_det = log_det_from_cholesky(lower, m) + static_cast<double>(m) * std::log(scale);
  return -0.5 * (static_cast<double>(m) * kLog2Pi + log_det + quad);
}

std::vector<double> mvn_sample(std::span<const double> mean, std::span<const double> lower,
                               std::size_t m, double scale, RngStream& rng) {
  std::vector<double> z(m);
  for (auto& v : z) v = rng.normal();
  std::vector<double> x(mean.begin(), mean.end());
  const double s = std::sqrt(scale);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= i; ++k) acc += lower[i * m + k] * z[k];
    x[i] += s * acc;
  }
  return x;
}

std::vector<double> symmetric_eigenvalues(std::span<const double> a, std::size_t m) {
  std::vector<double> w(a.begin(), a.end());
  auto off_diag = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) s += w[i * m + j] * w[i * m + j];
    return s;
  };
  for (int sweep = 0; sweep < 100 && off_diag() > 1e-24; ++sweep) {
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = w[p * m + q];
        if (std::abs(apq) < 1e-300) continue;
        const double app = w[p * m + p];
        const double aqq = w[q * m + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const double akp = w[k * m + p];
          const double akq = w[k * m + q];
          w[k * m + p] = c * akp - s * akq;
          w[k * m + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = w[p * m + k];
          const double aqk = w[q * m + k];
          w[p * m + k] = c * apk - s * aqk;
          w[q * m + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(m);
  for (std::size_t i = 0; i < m; ++i) eig[i] = w[i * m + i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v)
    if (x > mx) mx = x;
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace md
