#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "vorsim/density.hpp"
#include "vorsim/numerics.hpp"
#include "vorsim/polygon.hpp"

using namespace vorsim;

namespace {
constexpr double kPi = std::numbers::pi;

bool inside_convex(const std::vector<Vec2>& poly, const Point& q) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if ((b.x - a.x) * (q[1] - a.y) - (b.y - a.y) * (q[0] - a.x) < 0.0) return false;
  }
  return true;
}
}  // namespace

TEST_CASE("uniform box eval and sampling") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  CHECK(f.eval({0, 0}) == doctest::Approx(0.25));
  CHECK(f.eval({5, 5}) == 0.0);
  CHECK_THROWS_AS(f.eval({0.0}), std::invalid_argument);

  RngStream rng(101, 0, StreamPurpose::cloud);
  for (int i = 0; i < 1000; ++i) {
    const Point p = f.sample(rng);
    CHECK(p[0] >= -1.0);
    CHECK(p[0] <= 1.0);
    CHECK(p[1] >= -1.0);
    CHECK(p[1] <= 1.0);
  }
}

TEST_CASE("gaussian eval, sampling LLN") {
  const Density f = Density::isotropic_gaussian({0, 0}, 1.0);
  CHECK(f.eval({0, 0}) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
  RngStream rng(103, 0, StreamPurpose::cloud);
  const long n = 100000;
  double sx = 0.0;
  for (long i = 0; i < n; ++i) sx += f.sample(rng)[0];
  CHECK(std::fabs(sx / n) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("mixture respects weights") {
  const Density a = Density::uniform_box({0, 0}, {1, 1});
  const Density b = Density::uniform_box({10, 10}, {11, 11});
  const Density mix = Density::mixture({0.5, 0.5}, {a, b});
  RngStream rng(107, 0, StreamPurpose::cloud);
  const long n = 100000;
  long hits_a = 0;
  for (long i = 0; i < n; ++i) {
    if (mix.sample(rng)[0] < 5.0) ++hits_a;
  }
  const double frac = static_cast<double>(hits_a) / n;
  CHECK(std::fabs(frac - 0.5) < 3.0 * std::sqrt(0.25 / n));
  CHECK(mix.eval({0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(mix.eval({10.5, 10.5}) == doctest::Approx(0.5));
}

TEST_CASE("ball measure: uniform box") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  CHECK(f.ball_measure({{0, 0}, 0.5}) == doctest::Approx(0.25 * kPi * 0.25).epsilon(1e-12));
  CHECK(f.ball_measure({{0, 0}, 0.0}) == 0.0);
  CHECK(f.ball_measure({{0, 0}, 100.0}) == doctest::Approx(1.0).epsilon(1e-12));
  // Interior ball identity f * v_d * r^d in d = 1 and 2.
  const Density g1 = Density::uniform_box({-2}, {2});
  CHECK(g1.ball_measure({{0.5}, 0.25}) == doctest::Approx(0.25 * 2.0 * 0.25).epsilon(1e-12));
}

TEST_CASE("ball measure: gaussian via noncentral chi-square") {
  const Density f = Density::isotropic_gaussian({0, 0}, 1.0);
  CHECK(f.ball_measure({{0, 0}, 1.0}) ==
        doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-10));
  // Monotone in radius and saturates at 1.
  double prev = 0.0;
  for (double r : {0.2, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double m = f.ball_measure({{0.3, -0.4}, r});
    CHECK(m >= prev);
    prev = m;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));
  // Off-center cross-check against sampling.
  RngStream rng(109, 0, StreamPurpose::mc_volume);
  const Ball probe{{1.2, 0.3}, 0.9};
  const auto member = [&](const Point& p) {
    return dist_sq(p, probe.center) < probe.radius * probe.radius;
  };
  const McMeasure mc = predicate_measure_mc(f, member, 400000, rng);
  CHECK(std::fabs(mc.estimate - f.ball_measure(probe)) <= 4.0 * mc.se);
}

TEST_CASE("box measure is exact for every variant") {
  const Density box = Density::uniform_box({-1, -1}, {1, 1});
  CHECK(box.box_measure({0, 0}, {1, 1}) == doctest::Approx(0.25));
  CHECK(box.box_measure({0, 0}, {5, 5}) == doctest::Approx(0.25));

  const Density gauss = Density::isotropic_gaussian({0, 0}, 2.0);
  const double expect = (normal_cdf(0.5) - normal_cdf(-0.5)) * (normal_cdf(0.25) - normal_cdf(0.0));
  CHECK(gauss.box_measure({-1, 0}, {1, 0.5}) == doctest::Approx(expect).epsilon(1e-12));

  const Density mix = Density::mixture({0.25, 0.75}, {box, gauss});
  CHECK(mix.box_measure({-100, -100}, {100, 100}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("grid density: normalization, eval, sample, measures") {
  // 2 x 2 grid on [0,2]^2, cell size 1.
  const Density g = Density::grid({0, 0}, 1.0, {2, 2}, {1.0, 3.0, 2.0, 2.0});
  CHECK(g.box_measure({0, 0}, {2, 2}) == doctest::Approx(1.0).epsilon(1e-12));
  // values normalized: total raw mass 8, so value 3 -> 3/8 per unit area.
  CHECK(g.eval({1.5, 0.5}) == doctest::Approx(3.0 / 8.0).epsilon(1e-12));  // row 0, col 1
  CHECK(g.eval({0.5, 1.5}) == doctest::Approx(2.0 / 8.0).epsilon(1e-12));  // row 1, col 0
  CHECK(g.eval({-0.5, 0.5}) == 0.0);

  RngStream rng(113, 0, StreamPurpose::cloud);
  const long n = 80000;
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    const Point p = g.sample(rng);
    if (p[0] > 1.0 && p[1] < 1.0) ++hits;  // the weight-3 cell
  }
  CHECK(std::fabs(static_cast<double>(hits) / n - 3.0 / 8.0) < 3.0 * std::sqrt(0.25 / n));

  const Ball b{{1.0, 1.0}, 0.6};
  RngStream rng2(127, 0, StreamPurpose::mc_volume);
  const auto member = [&](const Point& p) {
    return dist_sq(p, b.center) < b.radius * b.radius;
  };
  const McMeasure mc = predicate_measure_mc(g, member, 400000, rng2);
  CHECK(std::fabs(mc.estimate - g.ball_measure(b)) <= 4.0 * mc.se);
}

TEST_CASE("grid density from csv") {
  const auto path = std::filesystem::temp_directory_path() / "vorsim_grid_test.csv";
  {
    std::ofstream out(path);
    out << "2,0.5,0,0\n";
    out << "1,1\n";
    out << "1,5\n";
  }
  const Density g = Density::grid_from_csv(path.string());
  CHECK(g.dimension() == 2);
  CHECK(g.box_measure({0, 0}, {1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  // Cell (row 1, col 1) covers [0.5,1]x[0.5,1] and has raw weight 5 of 8.
  CHECK(g.box_measure({0.5, 0.5}, {1, 1}) == doctest::Approx(5.0 / 8.0).epsilon(1e-12));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(Density::grid_from_csv("/nonexistent/file.csv"), std::runtime_error);
}

TEST_CASE("polygon measure matches the exact and sampled answers") {
  ConvexPolygon poly;
  poly.vertices = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  poly.tags = {0, 1, 2, 3};

  const Density box = Density::uniform_box({-1, -1}, {1, 1});
  CHECK(box.polygon_measure(poly) == doctest::Approx(0.25).epsilon(1e-12));

  // A polygon sticking out of the support only counts the inside part.
  ConvexPolygon wide;
  wide.vertices = {{0.0, -0.5}, {3.0, -0.5}, {3.0, 0.5}, {0.0, 0.5}};
  wide.tags = {0, 1, 2, 3};
  CHECK(box.polygon_measure(wide) == doctest::Approx(0.25 * 1.0).epsilon(1e-12));

  const Density gauss = Density::isotropic_gaussian({0.2, -0.1}, 0.8);
  RngStream rng(131, 0, StreamPurpose::mc_volume);
  const auto member = [&](const Point& q) { return inside_convex(poly.vertices, q); };
  const McMeasure mc = predicate_measure_mc(gauss, member, 400000, rng);
  CHECK(std::fabs(mc.estimate - gauss.polygon_measure(poly)) <= 4.0 * mc.se);

  const Density grid = Density::grid({-1, -1}, 0.25, {8, 8}, std::vector<double>(64, 1.0));
  CHECK(grid.polygon_measure(poly) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("predicate_measure_mc basics") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  RngStream rng(137, 0, StreamPurpose::mc_volume);
  const McMeasure all = predicate_measure_mc(f, [](const Point&) { return true; }, 1000, rng);
  CHECK(all.estimate == 1.0);
  CHECK(all.se == 0.0);
  const McMeasure none = predicate_measure_mc(f, [](const Point&) { return false; }, 1000, rng);
  CHECK(none.estimate == 0.0);

  const Ball b{{0, 0}, 0.5};
  const auto member = [&](const Point& p) {
    return dist_sq(p, b.center) < b.radius * b.radius;
  };
  const McMeasure mc = predicate_measure_mc(f, member, 200000, rng);
  CHECK(std::fabs(mc.estimate - f.ball_measure(b)) <= 3.0 * mc.se);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(Density::uniform_box({1, 1}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Density::isotropic_gaussian({0, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Density::mixture({0.5}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Density::grid({0, 0}, 1.0, {2, 2}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Density::grid({0, 0}, 1.0, {2, 2}, {0, 0, 0, 0}), std::invalid_argument);
}
