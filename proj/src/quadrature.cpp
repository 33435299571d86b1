#include "psfem/quadrature.hpp"

#include "psfem/errors.hpp"

#include <cmath>
#include <numbers>

namespace psfem {

void gauss_legendre_1d(int n, std::vector<double> &x, std::vector<double> &w) {
  if (n < 1 || n > 10)
    throw InputError("Gauss rule order must lie in [1, 10], got " + std::to_string(n));
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    if (n == 1) {
      z = 0.0;
      dp = 1.0;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

GaussRule gauss_rule(int n) {
  std::vector<double> x, w;
  gauss_legendre_1d(n, x, w);
  GaussRule rule;
  rule.n = n;
  rule.nodes.reserve(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) rule.nodes.push_back({x[i], x[j], w[i] * w[j]});
  return rule;
}

} // namespace psfem
