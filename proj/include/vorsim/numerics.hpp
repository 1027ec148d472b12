#pragma once

#include <span>

namespace vorsim {

// Regularized lower incomplete gamma P(a, x); series for x < a + 1, continued
// fraction otherwise.
double gamma_p(double a, double x);

// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi_square_cdf(double dof, double x);

// CDF of the noncentral chi-square distribution (dof, noncentrality lambda),
// evaluated by the Poisson-weighted central series.
double noncentral_chi_square_cdf(double dof, double lambda, double x);

// Standard normal CDF.
double normal_cdf(double z);

// Deterministic pairwise summation (fixed tree, independent of thread count).
double pairwise_sum(std::span<const double> xs);

}  // namespace vorsim
