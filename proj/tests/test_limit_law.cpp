#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vorsim/limit_law.hpp"

using namespace vorsim;

TEST_CASE("forced branches of the D_k ball list") {
  // w = 1, U1 = 0: balls are B_{1bar, 1} and B_{0, 0}; the union is one unit
  // ball, so D_1 = 1 in any dimension with an exact volume.
  for (int d : {1, 2}) {
    const std::vector<Point> u = {Point(d, 0.0)};
    const std::vector<Ball> balls = dk_ball_list(1, d, 1, u);
    REQUIRE(balls.size() == 2);
    CHECK(balls[1].radius == 0.0);
    RngStream rng(1, 0, StreamPurpose::mc_volume);
    std::string method;
    const double vol = dk_union_volume(balls, d, {}, rng, &method);
    CHECK(vol / unit_ball_volume(d) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((method == "interval-1d" || method == "exact-2ball"));
  }
}

TEST_CASE("w = 0 samples always contain the unit ball") {
  for (int d : {1, 2}) {
    RngStream rng(3 + d, 0, StreamPurpose::dk_draw);
    for (int it = 0; it < 2000; ++it) {
      std::vector<Point> u = {sample_uniform_ball(d, rng)};
      const std::vector<Ball> balls = dk_ball_list(1, d, 0, u);
      RngStream vr(5, static_cast<std::uint64_t>(it), StreamPurpose::mc_volume);
      const double value = dk_union_volume(balls, d, {}, vr) / unit_ball_volume(d);
      CHECK(value >= 1.0 - 1e-12);
    }
  }
}

TEST_CASE("samples stay within the certain range [2^-d, 3^d]") {
  VolumePolicy pol;
  pol.mc_samples = 4096;
  for (int d : {1, 2}) {
    for (int k : {1, 2, 3}) {
      const double lo = std::pow(2.0, -d);
      const double hi = std::pow(3.0, d);
      for (int it = 0; it < 5000; ++it) {
        RngStream rng(100 + 10 * d + k, static_cast<std::uint64_t>(it), StreamPurpose::dk_draw);
        const DkSample s = sample_dk(k, d, rng, pol);
        CHECK(s.value >= lo);
        CHECK(s.value <= hi);
        if (s.w == 0) CHECK(s.value >= 1.0 - 1e-12);
      }
    }
  }
}

TEST_CASE("w frequency matches Bernoulli(k/(k+1))") {
  const int k = 3;
  long w1 = 0;
  const long n = 100000;
  for (long it = 0; it < n; ++it) {
    RngStream rng(7, static_cast<std::uint64_t>(it), StreamPurpose::dk_draw);
    const DkSample s = sample_dk(k, 1, rng);
    if (s.w == 1) ++w1;
  }
  const double freq = static_cast<double>(w1) / n;
  const double target = 0.75;
  CHECK(std::fabs(freq - target) <= 3.0 * std::sqrt(target * (1 - target) / n));
}

TEST_CASE("d = 1: interval-exact and MC volumes agree on the same ball lists") {
  RngStream rng(11, 0, StreamPurpose::dk_draw);
  for (int it = 0; it < 50; ++it) {
    std::vector<Point> u;
    for (int i = 0; i < 2; ++i) u.push_back(sample_uniform_ball(1, rng));
    const std::vector<Ball> balls = dk_ball_list(2, 1, it % 2, u);
    const double exact = ball_union_length_1d(balls);
    RngStream mc_rng(13, static_cast<std::uint64_t>(it), StreamPurpose::mc_volume);
    const McEstimate mc = union_volume_mc(balls, 100000, mc_rng);
    CHECK(std::fabs(mc.estimate - exact) <= 4.0 * std::max(mc.se, 1e-12));
  }
}

TEST_CASE("limiting moment k=1 d=1 matches the quadrature oracle") {
  const double oracle = oracles::dk1_moment_quadrature_1d();
  CHECK(oracle == doctest::Approx(1.5).epsilon(1e-8));
  const MomentEstimate est = limiting_moment(1, 1, 200000, 17, {}, 2);
  CHECK(est.method == "interval-1d");
  CHECK(std::fabs(est.estimate - oracle) <= 3.0 * est.se);
}

TEST_CASE("limiting moment k=1 d=2: exact-2ball vs forced MC") {
  const MomentEstimate exact = limiting_moment(1, 2, 100000, 19, {}, 2);
  CHECK(exact.method == "exact-2ball");
  VolumePolicy pol;
  pol.force_mc = true;
  pol.mc_samples = 20000;
  const MomentEstimate mc = limiting_moment(1, 2, 20000, 23, pol, 2);
  const double combined = std::sqrt(exact.se * exact.se + mc.se * mc.se);
  CHECK(std::fabs(exact.estimate - mc.estimate) <= 4.0 * combined);
}

TEST_CASE("moment estimates stay below 2^{d(k+1)} (k+1)!") {
  VolumePolicy pol;
  pol.mc_samples = 2048;
  for (int d : {1, 2}) {
    for (int k : {1, 2, 3}) {
      const MomentEstimate est = limiting_moment(k, d, 20000, 1000 + 10 * d + k, pol, 2);
      const double bound = std::pow(2.0, d * (k + 1)) * factorial(k + 1);
      CHECK(est.estimate <= bound + 3.0 * est.se);
      CHECK(est.estimate > 0.0);
    }
  }
}

TEST_CASE("sample_limit_law: sorted, bounded, reproducible") {
  const auto samples = sample_limit_law(2, 2, 2000, 29, VolumePolicy{false, 4096}, 2);
  REQUIRE(samples.size() == 2000);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    CHECK(samples[i - 1].value <= samples[i].value);
  }
  CHECK(samples.front().value >= 0.25);
  const auto again = sample_limit_law(2, 2, 2000, 29, VolumePolicy{false, 4096}, 1);
  CHECK(samples.front().value == again.front().value);
  CHECK(samples.back().value == again.back().value);
}
