#include "vorsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vorsim {

EmpiricalDistribution EmpiricalDistribution::from_samples(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return {std::move(xs)};
}

double EmpiricalDistribution::ecdf(double z) const {
  if (samples.empty()) throw std::invalid_argument("ecdf: empty sample");
  const auto it = std::upper_bound(samples.begin(), samples.end(), z);
  return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
}

double EmpiricalDistribution::quantile(double q) const {
  if (samples.empty()) throw std::invalid_argument("quantile: empty sample");
  if (q <= 0.0) return samples.front();
  if (q >= 1.0) return samples.back();
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size()))) - 1;
  return samples[std::min(idx, samples.size() - 1)];
}

void Histogram::add(double v) {
  if (v < origin - 1e-12 * std::max(1.0, std::fabs(origin))) {
    throw std::invalid_argument("Histogram::add: value below origin");
  }
  const auto idx = static_cast<std::size_t>(std::max(0.0, std::floor((v - origin) / bin_width)));
  if (idx >= counts.size()) counts.resize(idx + 1, 0);
  ++counts[idx];
  ++n_total;
}

double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.samples.empty() || b.samples.empty()) {
    throw std::invalid_argument("ks_two_sample: empty sample");
  }
  const auto& xa = a.samples;
  const auto& xb = b.samples;
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() || j < xb.size()) {
    double z;
    if (i < xa.size() && j < xb.size()) {
      z = std::min(xa[i], xb[j]);
    } else if (i < xa.size()) {
      z = xa[i];
    } else {
      z = xb[j];
    }
    while (i < xa.size() && xa[i] <= z) ++i;
    while (j < xb.size() && xb[j] <= z) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate x");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.correlation = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return f;
}

MeanSe mean_and_se(std::span<const double> xs) {
  MeanSe r;
  r.n = static_cast<long>(xs.size());
  if (r.n == 0) return r;
  r.mean = pairwise_sum(xs) / static_cast<double>(r.n);
  if (r.n == 1) return r;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - r.mean;
    sq[i] = d * d;
  }
  r.variance = pairwise_sum(sq) / static_cast<double>(r.n - 1);
  r.se = std::sqrt(r.variance / static_cast<double>(r.n));
  return r;
}

double sample_correlation(std::span<const double> x, std::span<const double> y) {
  const LinearFit f = linear_fit(x, y);
  return f.correlation;
}

}  // namespace vorsim
