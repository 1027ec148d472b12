#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "vorsim/cells.hpp"

using namespace vorsim;

namespace {

PointCloud make_cloud(int dim, const std::vector<Point>& pts) {
  PointCloud c;
  c.dim = dim;
  for (const Point& p : pts) c.push(p);
  return c;
}

// Rotates a CCW vertex list to start at the lexicographically smallest
// vertex, so two builds of the same cell compare index-by-index.
std::vector<Vec2> canonical_cycle(const std::vector<Vec2>& vs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < vs.size(); ++i) {
    if (vs[i].x < vs[best].x || (vs[i].x == vs[best].x && vs[i].y < vs[best].y)) best = i;
  }
  std::vector<Vec2> out;
  out.reserve(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) out.push_back(vs[(best + i) % vs.size()]);
  return out;
}

bool same_polygon(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double tol) {
  if (a.size() != b.size()) return false;
  const std::vector<Vec2> ca = canonical_cycle(a);
  const std::vector<Vec2> cb = canonical_cycle(b);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (std::fabs(ca[i].x - cb[i].x) > tol || std::fabs(ca[i].y - cb[i].y) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("nearest_two: order, ties, errors") {
  const PointCloud cloud = make_cloud(2, {{1, 0}, {3, 0}});
  const NearestTwo nt = nearest_two({0, 0}, cloud);
  CHECK(nt.i1 == 0);
  CHECK(nt.d1 == doctest::Approx(1.0));
  CHECK(nt.i2 == 1);
  CHECK(nt.d2 == doctest::Approx(3.0));

  const PointCloud tie = make_cloud(2, {{1, 0}, {-1, 0}});
  CHECK(nearest_two({0, 0}, tie).i1 == 0);  // lower index wins

  const PointCloud one = make_cloud(2, {{1, 0}});
  CHECK_THROWS_AS(nearest_two({0, 0}, one), std::invalid_argument);
}

TEST_CASE("cell membership: closed inequality") {
  const PointCloud cloud = make_cloud(2, {{2, 0}});
  CHECK(cell_membership({0.5, 0.0}, {0.0, 0.0}, cloud));
  CHECK_FALSE(cell_membership({1.5, 0.0}, {0.0, 0.0}, cloud));
  CHECK(cell_membership({1.0, 0.0}, {0.0, 0.0}, cloud));  // equidistant -> member
}

TEST_CASE("inscribed ball B(x, (d2-d1)/2) lies in the containing cell") {
  // The triangle inequality gives ||z-X_(1)|| <= ||z-x|| + d1 and
  // ||z-X_(i)|| >= d2 - ||z-x||, so radius (d2-d1)/2 guarantees membership.
  // Radius d2-d1 does not: see the counterexample case below.
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  long tested = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    RngStream rng(211, static_cast<std::uint64_t>(trial), StreamPurpose::cloud);
    const PointCloud cloud = sample_iid(f, 100, rng);
    Point x = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const NearestTwo nt = nearest_two(x, cloud);
    const double r = 0.5 * (nt.d2 - nt.d1);
    if (r <= 0.0) continue;
    const Point nucleus = cloud.point(nt.i1);
    for (int s = 0; s < 8; ++s) {
      Point u = sample_uniform_ball(2, rng);
      const Point q = {x[0] + r * u[0], x[1] + r * u[1]};
      CHECK(cell_membership(q, nucleus, cloud, nt.i1));
      ++tested;
    }
  }
  CHECK(tested > 5000);
}

TEST_CASE("radius d2-d1 admits counterexamples (unhalved inclusion is false)") {
  // x = 0 between X_1 = 1 and X_2 = -1.5: d2 - d1 = 0.5, but z = -0.4 inside
  // B(x, 0.5) is closer to X_2 (1.1) than to the nucleus X_1 (1.4).
  const PointCloud cloud = make_cloud(1, {{1.0}, {-1.5}});
  const NearestTwo nt = nearest_two({0.0}, cloud);
  CHECK(nt.d2 - nt.d1 == doctest::Approx(0.5));
  const Point z = {-0.4};
  CHECK(std::fabs(z[0]) < nt.d2 - nt.d1);  // z is inside B(x, d2-d1)
  CHECK_FALSE(cell_membership(z, cloud.point(nt.i1), cloud, nt.i1));
}

TEST_CASE("resolve_cell: hand-checkable fixed nucleus cell") {
  const Density f = Density::uniform_box({-10, -10}, {10, 10});
  const PointCloud cloud = make_cloud(2, {{2, 0}, {-2, 0}, {0, 2}, {0, -2}});
  RngStream rng(1, 0, StreamPurpose::generic);
  const CellQuery q{CellMode::fixed_nucleus, {0, 0}, &cloud, 0.0};
  ResolveOptions opts;
  opts.keep_polygon = true;
  const CellReport rep = resolve_cell(q, f, rng, opts);
  CHECK(rep.lebesgue.value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(rep.edge_count == 4);
  CHECK_FALSE(rep.truncated);
  CHECK(rep.mu.value == doctest::Approx(4.0 / 400.0).epsilon(1e-12));
  CHECK(rep.mu.method == MethodTag::exact);
  CHECK(rep.nucleus_index == -1);
  REQUIRE(rep.polygon.has_value());
  CHECK(rep.polygon->size() == 4);
}

TEST_CASE("resolve_cell: containing with a single point owns everything") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  const PointCloud cloud = make_cloud(2, {{0.3, 0.2}});
  RngStream rng(2, 0, StreamPurpose::generic);
  const CellQuery q{CellMode::containing, {0, 0}, &cloud, 0.0};
  const CellReport rep = resolve_cell(q, f, rng);
  CHECK(rep.mu.value == doctest::Approx(1.0));
  CHECK(rep.truncated);
  CHECK(rep.nucleus_index == 0);
}

TEST_CASE("resolve_cell: containing picks the nearer symmetric point") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  const PointCloud cloud = make_cloud(2, {{-1, 0}, {1, 0}});
  RngStream rng(3, 0, StreamPurpose::generic);
  const CellQuery q{CellMode::containing, {0.1, 0.0}, &cloud, 0.0};
  const CellReport rep = resolve_cell(q, f, rng);
  CHECK(rep.nucleus_index == 1);
  CHECK(rep.nucleus[0] == doctest::Approx(1.0));
  CHECK(rep.truncated);  // half-plane cell is unbounded
}

TEST_CASE("resolve_cell: containing errors") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  const PointCloud empty = make_cloud(2, {});
  RngStream rng(4, 0, StreamPurpose::generic);
  const CellQuery q{CellMode::containing, {0, 0}, &empty, 0.0};
  CHECK_THROWS_AS(resolve_cell(q, f, rng), std::invalid_argument);
  const CellQuery qp{CellMode::poisson_typical, {0, 0}, nullptr, 0.0};
  CHECK_THROWS_AS(resolve_cell(qp, f, rng), std::invalid_argument);
}

TEST_CASE("membership midpoints stay in the cell (convexity)") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  long pairs = 0;
  for (int trial = 0; trial < 50 && pairs < 10000; ++trial) {
    RngStream rng(223, static_cast<std::uint64_t>(trial), StreamPurpose::cloud);
    const PointCloud cloud = sample_iid(f, 200, rng);
    const Point x = {0.0, 0.0};
    const NearestTwo nt = nearest_two(x, cloud);
    const Point nucleus = cloud.point(nt.i1);
    const double r = 4.0 * nt.d2;
    std::vector<Point> members;
    for (int s = 0; s < 2000 && members.size() < 40; ++s) {
      const Point q = {nucleus[0] + rng.uniform(-r, r), nucleus[1] + rng.uniform(-r, r)};
      if (cell_membership(q, nucleus, cloud, nt.i1)) members.push_back(q);
    }
    for (std::size_t i = 0; i + 1 < members.size(); i += 2) {
      const Point mid = {0.5 * (members[i][0] + members[i + 1][0]),
                         0.5 * (members[i][1] + members[i + 1][1])};
      CHECK(cell_membership(mid, nucleus, cloud, nt.i1));
      ++pairs;
    }
  }
  CHECK(pairs >= 500);
}

TEST_CASE("exact polygon mu agrees with the sampling estimator") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  RngStream rng(227, 5, StreamPurpose::cloud);
  const PointCloud cloud = sample_iid(f, 300, rng);
  const CellQuery q{CellMode::containing, {0, 0}, &cloud, 0.0};
  const CellReport rep = resolve_cell(q, f, rng);
  REQUIRE_FALSE(rep.truncated);
  const NearestTwo nt = nearest_two({0, 0}, cloud);
  const Point nucleus = cloud.point(nt.i1);
  RngStream mc_rng(229, 0, StreamPurpose::mc_volume);
  const auto member = [&](const Point& p) {
    return cell_membership(p, nucleus, cloud, nt.i1);
  };
  const McMeasure mc = predicate_measure_mc(f, member, 300000, mc_rng);
  CHECK(std::fabs(mc.estimate - rep.mu.value) <= 4.0 * mc.se);
}

TEST_CASE("one-dimensional cells are exact intervals") {
  const Density f = Density::uniform_box({-1.0}, {1.0});
  const PointCloud cloud = make_cloud(1, {{-0.5}, {0.3}, {0.8}});
  RngStream rng(5, 0, StreamPurpose::generic);
  const CellQuery q{CellMode::containing, {0.1}, &cloud, 0.0};
  const CellReport rep = resolve_cell(q, f, rng);
  CHECK(rep.nucleus_index == 1);
  REQUIRE(rep.interval.has_value());
  CHECK(rep.interval->first == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(rep.interval->second == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(rep.lebesgue.value == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(rep.mu.value == doctest::Approx(0.65 * 0.5).epsilon(1e-12));
  CHECK_FALSE(rep.truncated);
  CHECK(rep.diameter == doctest::Approx(0.65).epsilon(1e-12));

  const PointCloud two = make_cloud(1, {{-0.5}, {0.3}});
  const CellQuery q2{CellMode::containing, {0.1}, &two, 0.0};
  const CellReport rep2 = resolve_cell(q2, f, rng);
  CHECK(rep2.truncated);  // no point to the right of the nucleus
}

TEST_CASE("prune_outside: identity, adversarial point, randomized equivalence") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  const Point x = {0.0, 0.0};
  const double t = 0.8;

  long qualifying = 0;
  for (int trial = 0; trial < 300 && qualifying < 200; ++trial) {
    RngStream rng(233, static_cast<std::uint64_t>(trial), StreamPurpose::cloud);
    PointCloud cloud = sample_iid(f, 800, rng);
    const PointCloud pruned = prune_outside(x, t, cloud, CellMode::containing);
    if (pruned.size() < 2) continue;

    ResolveOptions opts;
    opts.keep_polygon = true;
    opts.fixed_clip = BoundingBox2{-2.0 * t, -2.0 * t, 2.0 * t, 2.0 * t};
    RngStream r1(1, 0, StreamPurpose::generic), r2(1, 0, StreamPurpose::generic);
    const CellQuery qp{CellMode::containing, x, &pruned, 0.0};
    const CellReport rp = resolve_cell(qp, f, r1, opts);
    if (rp.truncated || rp.diameter > t / 4.0) continue;
    ++qualifying;

    // Full cloud plus an adversarial far point.
    cloud.push(std::vector<double>{10.0 * t, 0.0});
    const CellQuery qf{CellMode::containing, x, &cloud, 0.0};
    const CellReport rf = resolve_cell(qf, f, r2, opts);
    CHECK(rf.nucleus == rp.nucleus);
    REQUIRE(rp.polygon.has_value());
    REQUIRE(rf.polygon.has_value());
    CHECK(same_polygon(rp.polygon->vertices, rf.polygon->vertices, 1e-9));
  }
  CHECK(qualifying >= 200);

  // All points already inside: identity.
  const PointCloud small = make_cloud(2, {{0.1, 0.0}, {0.0, 0.2}});
  const PointCloud same = prune_outside(x, 1.0, small, CellMode::fixed_nucleus);
  CHECK(same.data == small.data);
  CHECK_THROWS_AS(prune_outside(x, 0.0, small, CellMode::containing), std::invalid_argument);
}

TEST_CASE("reported polygon agrees with the membership predicate") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  for (int trial = 0; trial < 40; ++trial) {
    RngStream rng(251, static_cast<std::uint64_t>(trial), StreamPurpose::cloud);
    const PointCloud cloud = sample_iid(f, 250, rng);
    const Point x = {rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
    ResolveOptions opts;
    opts.keep_polygon = true;
    const CellQuery q{CellMode::containing, x, &cloud, 0.0};
    const CellReport rep = resolve_cell(q, f, rng, opts);
    if (rep.truncated) continue;
    REQUIRE(rep.polygon.has_value());
    const auto& vs = rep.polygon->vertices;
    // The probe lies in the reported cell.
    const auto inside = [&](const Point& p) {
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const Vec2& a = vs[i];
        const Vec2& b = vs[(i + 1) % vs.size()];
        if ((b.x - a.x) * (p[1] - a.y) - (b.y - a.y) * (p[0] - a.x) < -1e-9) return false;
      }
      return true;
    };
    CHECK(inside(x));
    // Points sampled inside the polygon satisfy membership for the nucleus.
    double xlo = vs[0].x, xhi = vs[0].x, ylo = vs[0].y, yhi = vs[0].y;
    for (const Vec2& v : vs) {
      xlo = std::min(xlo, v.x);
      xhi = std::max(xhi, v.x);
      ylo = std::min(ylo, v.y);
      yhi = std::max(yhi, v.y);
    }
    int found = 0;
    for (int s = 0; s < 400 && found < 25; ++s) {
      const Point p = {rng.uniform(xlo, xhi), rng.uniform(ylo, yhi)};
      if (!inside(p)) continue;
      ++found;
      CHECK(cell_membership(p, rep.nucleus, cloud,
                            static_cast<std::size_t>(rep.nucleus_index)));
    }
    CHECK(found > 0);
  }
}

TEST_CASE("d >= 3 cells: Monte Carlo measures are mutually consistent") {
  const Density f = Density::uniform_box({-1, -1, -1}, {1, 1, 1});
  RngStream rng(257, 0, StreamPurpose::cloud);
  const PointCloud cloud = sample_iid(f, 120, rng);
  ResolveOptions opts;
  opts.mc_measure_samples = 60000;
  const CellQuery q{CellMode::containing, {0.0, 0.0, 0.0}, &cloud, 0.0};
  const CellReport rep = resolve_cell(q, f, rng, opts);
  CHECK(rep.edge_count == -1);
  CHECK(rep.mu.method == MethodTag::monte_carlo);
  CHECK(rep.lebesgue.method == MethodTag::monte_carlo);
  CHECK(rep.diameter > 0.0);
  if (!rep.truncated) {
    // Under the uniform density mu = f * lambda; the two estimates come from
    // different sampling routes and must agree within noise.
    const double f0 = 1.0 / 8.0;
    const double combined =
        std::sqrt(rep.mu.se * rep.mu.se + f0 * f0 * rep.lebesgue.se * rep.lebesgue.se);
    CHECK(std::fabs(rep.mu.value - f0 * rep.lebesgue.value) <= 4.0 * combined);
  }
}

TEST_CASE("poisson typical cell: deterministic, sane geometry") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  const double intensity = 250.0;
  for (int trial = 0; trial < 50; ++trial) {
    RngStream r1(239, static_cast<std::uint64_t>(trial), StreamPurpose::poisson_cloud);
    RngStream r2(239, static_cast<std::uint64_t>(trial), StreamPurpose::poisson_cloud);
    const CellQuery q{CellMode::poisson_typical, {0, 0}, nullptr, intensity};
    const CellReport a = resolve_cell(q, f, r1);
    const CellReport b = resolve_cell(q, f, r2);
    CHECK(a.lebesgue.value == b.lebesgue.value);
    CHECK(a.edge_count == b.edge_count);
    if (!a.truncated) {
      CHECK(a.edge_count >= 3);
      CHECK(a.lebesgue.value > 0.0);
      // Homogeneous mass plays the role of n mu_f.
      CHECK(a.mu.value == doctest::Approx(intensity * a.lebesgue.value));
    }
  }
}

TEST_CASE("poisson typical cell grows the window when the target is tiny") {
  const Density f = Density::uniform_box({-1, -1}, {1, 1});
  ResolveOptions opts;
  opts.poisson_window_target = 3.0;  // deliberately undersized initial window
  long ok = 0;
  for (int trial = 0; trial < 30; ++trial) {
    RngStream rng(241, static_cast<std::uint64_t>(trial), StreamPurpose::poisson_cloud);
    const CellQuery q{CellMode::poisson_typical, {0, 0}, nullptr, 100.0};
    const CellReport rep = resolve_cell(q, f, rng, opts);
    if (!rep.truncated) {
      ++ok;
      CHECK(rep.edge_count >= 3);
    }
  }
  CHECK(ok >= 25);
}
