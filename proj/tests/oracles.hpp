#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <vector>

namespace vorsim::oracles {

// Exact Bin(n, p) upper tail P(Z >= t) by direct summation of log-pmf terms.
inline double binomial_upper_tail(long n, double p, long t) {
  if (t <= 0) return 1.0;
  if (t > n) return 0.0;
  double sum = 0.0;
  for (long k = t; k <= n; ++k) {
    const double logpmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                          std::lgamma(n - k + 1.0) + k * std::log(p) +
                          (n - k) * std::log1p(-p);
    sum += std::exp(logpmf);
  }
  return std::min(sum, 1.0);
}

// Exact Bin(n, p) lower tail P(Z <= t).
inline double binomial_lower_tail(long n, double p, long t) {
  if (t < 0) return 0.0;
  if (t >= n) return 1.0;
  double sum = 0.0;
  for (long k = 0; k <= t; ++k) {
    const double logpmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                          std::lgamma(n - k + 1.0) + k * std::log(p) +
                          (n - k) * std::log1p(-p);
    sum += std::exp(logpmf);
  }
  return std::min(sum, 1.0);
}

// D_1 in d = 1, straight from the definition: the two branch interval unions,
// with 1-bar = 1 and B_{0,1} = (-1,1). U is the scalar uniform-in-ball draw.
inline double dk1_value_1d(double u, int w) {
  double lo1, hi1, lo2, hi2;
  if (w == 0) {
    const double r = std::fabs(1.0 - u);
    lo1 = u - r;
    hi1 = u + r;
    lo2 = -1.0;
    hi2 = 1.0;
  } else {
    const double r1 = std::fabs(1.0 - u);
    lo1 = 1.0 - r1;
    hi1 = 1.0 + r1;
    const double r2 = std::fabs(u);
    lo2 = -r2;
    hi2 = r2;
  }
  // Union length of two intervals.
  const double overlap =
      std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
  const double len = (hi1 - lo1) + (hi2 - lo2) - overlap;
  return len / 2.0;  // lambda(B_{0,1}) = 2 in d = 1
}

// Deterministic quadrature for E[2 / D_1^2] in d = 1: U uniform on [-1,1]
// (density 1/2), branches weighted 1/2 each. Composite Simpson.
inline double dk1_moment_quadrature_1d(long panels = 20000) {
  double total = 0.0;
  for (int w = 0; w <= 1; ++w) {
    const double a = -1.0, b = 1.0;
    const double h = (b - a) / static_cast<double>(panels);
    double s = 0.0;
    auto f = [w](double u) {
      const double d = dk1_value_1d(u, w);
      return 2.0 / (d * d);
    };
    for (long i = 0; i < panels; ++i) {
      const double x0 = a + i * h;
      s += (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h)) * h / 6.0;
    }
    total += 0.5 * 0.5 * s;  // branch weight 1/2, density 1/2
  }
  return total;
}

}  // namespace vorsim::oracles
