#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "vorsim/stats.hpp"

using namespace vorsim;

TEST_CASE("ecdf and quantiles") {
  const auto e = EmpiricalDistribution::from_samples({3.0, 1.0, 2.0});
  CHECK(e.samples == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(e.ecdf(0.5) == 0.0);
  CHECK(e.ecdf(1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(e.ecdf(2.5) == doctest::Approx(2.0 / 3.0));
  CHECK(e.ecdf(9.0) == 1.0);
  CHECK(e.quantile(0.0) == 1.0);
  CHECK(e.quantile(0.5) == 2.0);
  CHECK(e.quantile(1.0) == 3.0);
}

TEST_CASE("two-sample KS hand cases") {
  const auto a = EmpiricalDistribution::from_samples({1, 2, 3, 4});
  CHECK(ks_two_sample(a, a) == 0.0);

  const auto zero = EmpiricalDistribution::from_samples({0.0});
  const auto one = EmpiricalDistribution::from_samples({1.0});
  CHECK(ks_two_sample(zero, one) == doctest::Approx(1.0));

  const auto b = EmpiricalDistribution::from_samples({1.5, 2.5, 3.5, 4.5});
  CHECK(ks_two_sample(a, b) == doctest::Approx(0.25));

  // Ties across the two samples.
  const auto ta = EmpiricalDistribution::from_samples({1, 1, 2});
  const auto tb = EmpiricalDistribution::from_samples({1, 2, 2});
  CHECK(ks_two_sample(ta, tb) == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(ks_two_sample(EmpiricalDistribution{}, a), std::invalid_argument);
}

TEST_CASE("histogram bins and conservation") {
  Histogram h{0.5, 0.0, {}, 0};
  h.add(0.1);
  h.add(0.6);
  h.add(0.74);
  h.add(2.3);
  CHECK(h.n_total == 4);
  long sum = 0;
  for (long c : h.counts) sum += c;
  CHECK(sum == h.n_total);
  CHECK(h.counts[0] == 1);
  CHECK(h.counts[1] == 2);
  CHECK(h.counts[4] == 1);
  CHECK(h.bin_lo(1) == doctest::Approx(0.5));
  CHECK(h.bin_hi(1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(h.add(-0.2), std::invalid_argument);
}

TEST_CASE("linear fit recovers exact lines") {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * v + 1.0);
  const LinearFit f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.correlation == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> yd;
  for (double v : x) yd.push_back(-0.5 * v);
  CHECK(linear_fit(x, yd).correlation == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("mean and se") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const MeanSe m = mean_and_se(xs);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.variance == doctest::Approx(5.0 / 3.0));
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 12.0)));
}
