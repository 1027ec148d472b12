#include "vorsim/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace vorsim {

namespace {

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  // Lentz's algorithm for the continued fraction of Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_p: a must be > 0");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi_square_cdf(double dof, double x) {
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double noncentral_chi_square_cdf(double dof, double lambda, double x) {
  if (x <= 0.0) return 0.0;
  if (lambda <= 0.0) return chi_square_cdf(dof, x);
  const double half = 0.5 * lambda;
  // Poisson weights around their mode, expanded until negligible.
  const long j0 = static_cast<long>(half);
  double w0 = std::exp(-half + j0 * std::log(half) - std::lgamma(j0 + 1.0));
  double sum = w0 * chi_square_cdf(dof + 2.0 * j0, x);
  double w = w0;
  for (long j = j0 + 1; j < j0 + 4000; ++j) {
    w *= half / static_cast<double>(j);
    const double term = w * chi_square_cdf(dof + 2.0 * j, x);
    sum += term;
    if (w < 1e-18) break;
  }
  w = w0;
  for (long j = j0; j >= 1; --j) {
    w *= static_cast<double>(j) / half;
    const double term = w * chi_square_cdf(dof + 2.0 * (j - 1), x);
    sum += term;
    if (w < 1e-18) break;
  }
  return std::fmin(sum, 1.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : xs) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace vorsim
