#pragma once

#include <span>
#include <vector>

#include "vorsim/numerics.hpp"

namespace vorsim {

// Sorted-sample empirical distribution; the ECDF is the right-continuous step
// function through the samples.
struct EmpiricalDistribution {
  std::vector<double> samples;  // non-decreasing

  static EmpiricalDistribution from_samples(std::vector<double> xs);
  double ecdf(double z) const;       // fraction of samples <= z
  double quantile(double q) const;   // q in [0, 1]
  std::size_t size() const { return samples.size(); }
};

// Fixed-width bins; bin i covers [origin + i*w, origin + (i+1)*w).
struct Histogram {
  double bin_width = 0.05;
  double origin = 0.0;
  std::vector<long> counts;
  long n_total = 0;

  void add(double v);
  double bin_lo(std::size_t i) const { return origin + static_cast<double>(i) * bin_width; }
  double bin_hi(std::size_t i) const { return origin + static_cast<double>(i + 1) * bin_width; }
};

// Two-sample Kolmogorov-Smirnov statistic: sup over the pooled sample points
// of |ECDF_a - ECDF_b|, exact for step functions (ties handled).
double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double variance = 0.0;
  long n = 0;
};

// Mean, sample variance and standard error, summed pairwise for determinism.
MeanSe mean_and_se(std::span<const double> xs);

double sample_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace vorsim
