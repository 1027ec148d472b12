#include "vorsim/cells.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vorsim {

const char* method_name(MethodTag m) {
  switch (m) {
    case MethodTag::exact:
      return "exact";
    case MethodTag::quadrature:
      return "quadrature";
    case MethodTag::monte_carlo:
      return "mc";
  }
  return "?";
}

NearestTwo nearest_two(const Point& x, const PointCloud& cloud) {
  if (cloud.size() < 2) throw std::invalid_argument("nearest_two: need at least 2 points");
  NearestTwo nt;
  double best1 = std::numeric_limits<double>::infinity();
  double best2 = std::numeric_limits<double>::infinity();
  std::size_t i1 = 0, i2 = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d2 = dist_sq(cloud.at(i), x);
    if (d2 < best1) {
      best2 = best1;
      i2 = i1;
      best1 = d2;
      i1 = i;
    } else if (d2 < best2) {
      best2 = d2;
      i2 = i;
    }
  }
  nt.i1 = i1;
  nt.d1 = std::sqrt(best1);
  nt.i2 = i2;
  nt.d2 = std::sqrt(best2);
  return nt;
}

bool cell_membership(const Point& q, const Point& nucleus, const PointCloud& cloud,
                     std::optional<std::size_t> exclude) {
  const double dn = dist_sq(q, nucleus);
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    if (exclude && *exclude == j) continue;
    if (dist_sq(q, cloud.at(j)) < dn) return false;
  }
  return true;
}

PointCloud prune_outside(const Point& x, double t, const PointCloud& cloud, CellMode) {
  if (!(t > 0.0)) throw std::invalid_argument("prune_outside: t must be > 0");
  PointCloud out;
  out.dim = cloud.dim;
  const double t2 = t * t;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (dist_sq(cloud.at(i), x) < t2) out.push(cloud.at(i));
  }
  return out;
}

namespace {

MethodTag density_polygon_method(const Density& density) {
  // Rectangle clipping is exact for the piecewise-constant variants; the
  // Gaussian goes through quadrature. Mixtures inherit the weaker tag.
  return density.is_uniform_box() ? MethodTag::exact : MethodTag::quadrature;
}

struct Generators2D {
  Vec2 nucleus;
  std::vector<Vec2> others;
};

// Second-nearest distance from the nucleus among the other generators, used
// to size the initial clip box.
double clip_seed_distance(const Generators2D& g) {
  double b1 = std::numeric_limits<double>::infinity();
  double b2 = b1;
  for (const Vec2& o : g.others) {
    const double dx = o.x - g.nucleus.x;
    const double dy = o.y - g.nucleus.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < b1) {
      b2 = b1;
      b1 = d2;
    } else if (d2 < b2) {
      b2 = d2;
    }
  }
  if (g.others.size() == 1) return 2.0 * std::sqrt(b1);
  return std::sqrt(b2);
}

struct BuiltCell2D {
  ConvexPolygon poly;
  PolygonMetrics metrics;
  bool truncated = false;
};

BuiltCell2D build_cell_2d(const Generators2D& g, const ResolveOptions& opts) {
  BuiltCell2D out;
  if (opts.fixed_clip) {
    out.poly = halfplane_intersection_2d(g.nucleus, g.others, *opts.fixed_clip);
    out.metrics = polygon_metrics(out.poly);
    out.truncated = out.metrics.touches_clip;
    return out;
  }
  double hw = opts.clip_halfwidth_factor * clip_seed_distance(g);
  for (int attempt = 0;; ++attempt) {
    out.poly = halfplane_intersection_2d(g.nucleus, g.others,
                                         BoundingBox2::centered(g.nucleus, hw));
    out.metrics = polygon_metrics(out.poly);
    out.truncated = out.metrics.touches_clip;
    if (!out.truncated || attempt >= opts.max_clip_doublings) return out;
    hw *= 2.0;
  }
}

// Whole-space cell (no competing generators): measures are exact, geometry is
// reported against a reference box and flagged truncated.
CellReport whole_space_report(const Point& nucleus, long nucleus_index, int d,
                              const Density& density, bool homogeneous, double intensity,
                              const ResolveOptions& opts) {
  CellReport rep;
  rep.nucleus = nucleus;
  rep.nucleus_index = nucleus_index;
  rep.truncated = true;
  rep.generator_count = 0;
  const double hw = opts.fixed_clip ? 0.5 * (opts.fixed_clip->xhi - opts.fixed_clip->xlo)
                                    : 1.0 + norm(nucleus);
  const double vol = std::pow(2.0 * hw, d);
  rep.lebesgue = {vol, 0.0, MethodTag::exact};
  rep.diameter = 2.0 * hw * std::sqrt(static_cast<double>(d));
  rep.diameter_method = MethodTag::exact;
  rep.edge_count = 0;
  if (homogeneous) {
    rep.mu = {intensity * vol, 0.0, MethodTag::exact};
  } else {
    rep.mu = {1.0, 0.0, MethodTag::exact};
  }
  if (d == 1) rep.interval = {nucleus[0] - hw, nucleus[0] + hw};
  return rep;
}

CellReport resolve_cell_1d(const Point& nucleus, long nucleus_index,
                           const PointCloud& others, const Density& density,
                           bool homogeneous, double intensity, const ResolveOptions& opts) {
  CellReport rep;
  rep.nucleus = nucleus;
  rep.nucleus_index = nucleus_index;
  rep.generator_count = static_cast<long>(others.size());
  const double c = nucleus[0];
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double b1 = std::numeric_limits<double>::infinity(), b2 = b1;
  for (std::size_t i = 0; i < others.size(); ++i) {
    const double o = others.at(i)[0];
    if (o < c) lo = std::max(lo, 0.5 * (o + c));
    if (o > c) hi = std::min(hi, 0.5 * (o + c));
    const double d = std::fabs(o - c);
    if (d < b1) {
      b2 = b1;
      b1 = d;
    } else if (d < b2) {
      b2 = d;
    }
  }
  const double seed = std::isfinite(b2) ? b2 : (std::isfinite(b1) ? 2.0 * b1 : 1.0);
  const double cap =
      opts.clip_halfwidth_factor * seed * std::pow(2.0, opts.max_clip_doublings);
  if (!std::isfinite(lo)) {
    lo = c - cap;
    rep.truncated = true;
  }
  if (!std::isfinite(hi)) {
    hi = c + cap;
    rep.truncated = true;
  }
  rep.interval = {lo, hi};
  const double len = hi - lo;
  rep.lebesgue = {len, 0.0, MethodTag::exact};
  rep.diameter = len;
  rep.diameter_method = MethodTag::exact;
  rep.edge_count = -1;
  if (homogeneous) {
    rep.mu = {intensity * len, 0.0, MethodTag::exact};
  } else {
    rep.mu = {density.box_measure({lo}, {hi}), 0.0, MethodTag::exact};
  }
  return rep;
}

CellReport resolve_cell_2d(const Point& nucleus, long nucleus_index,
                           const Generators2D& gens, const Density& density,
                           bool homogeneous, double intensity, const ResolveOptions& opts) {
  CellReport rep;
  rep.nucleus = nucleus;
  rep.nucleus_index = nucleus_index;
  rep.generator_count = static_cast<long>(gens.others.size());
  BuiltCell2D cell = build_cell_2d(gens, opts);
  rep.truncated = cell.truncated;
  rep.lebesgue = {cell.metrics.area, 0.0, MethodTag::exact};
  rep.diameter = cell.metrics.diameter;
  rep.diameter_method = MethodTag::exact;
  rep.edge_count = cell.metrics.bisector_edge_count;
  if (homogeneous) {
    rep.mu = {intensity * cell.metrics.area, 0.0, MethodTag::exact};
  } else {
    rep.mu = {density.polygon_measure(cell.poly), 0.0, density_polygon_method(density)};
  }
  if (opts.keep_polygon) rep.polygon = std::move(cell.poly);
  return rep;
}

// d >= 3: measures by Monte Carlo against a bounding ball found by boundary
// probing; diameter is a two-pass lower-bound estimate over accepted hits.
CellReport resolve_cell_nd(const Point& nucleus, long nucleus_index, const PointCloud& cloud,
                           std::optional<std::size_t> exclude, const Density& density,
                           bool homogeneous, double intensity, RngStream& rng,
                           const ResolveOptions& opts) {
  const int d = static_cast<int>(nucleus.size());
  CellReport rep;
  rep.nucleus = nucleus;
  rep.nucleus_index = nucleus_index;
  rep.generator_count =
      static_cast<long>(cloud.size()) - (exclude.has_value() ? 1 : 0);

  double b1 = std::numeric_limits<double>::infinity(), b2 = b1;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (exclude && *exclude == i) continue;
    const double dd = dist_sq(cloud.at(i), nucleus);
    if (dd < b1) {
      b2 = b1;
      b1 = dd;
    } else if (dd < b2) {
      b2 = dd;
    }
  }
  double radius = 4.0 * std::sqrt(std::isfinite(b2) ? b2 : b1);
  bool bounded = false;
  for (int attempt = 0; attempt <= opts.max_clip_doublings; ++attempt) {
    bounded = true;
    for (int k = 0; k < 128; ++k) {
      Point dir = sample_uniform_ball(d, rng);
      const double n = norm(dir);
      if (n == 0.0) continue;
      Point q(d);
      for (int i = 0; i < d; ++i) q[i] = nucleus[i] + radius * dir[i] / n;
      if (cell_membership(q, nucleus, cloud, exclude)) {
        bounded = false;
        break;
      }
    }
    if (bounded) break;
    radius *= 2.0;
  }
  rep.truncated = !bounded;

  const long n_samples = std::max<long>(opts.mc_measure_samples, 1);
  long hits = 0;
  std::vector<Point> hit_points;
  for (long s = 0; s < n_samples; ++s) {
    Point q = sample_uniform_ball(d, rng);
    for (int i = 0; i < d; ++i) q[i] = nucleus[i] + radius * q[i];
    if (cell_membership(q, nucleus, cloud, exclude)) {
      ++hits;
      if (hit_points.size() < 4096) hit_points.push_back(std::move(q));
    }
  }
  const double ball_vol = ball_volume(d, radius);
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  rep.lebesgue = {ball_vol * p,
                  ball_vol * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples)),
                  MethodTag::monte_carlo};

  // Two-pass farthest-pair heuristic on the accepted hits.
  double best = 0.0;
  if (!hit_points.empty()) {
    std::size_t a = 0;
    double da = 0.0;
    for (std::size_t i = 0; i < hit_points.size(); ++i) {
      const double dd = dist_sq(hit_points[i], nucleus);
      if (dd > da) {
        da = dd;
        a = i;
      }
    }
    for (const Point& h : hit_points) best = std::max(best, dist_sq(h, hit_points[a]));
  }
  rep.diameter = std::sqrt(best);
  rep.diameter_method = MethodTag::monte_carlo;
  rep.edge_count = -1;

  if (homogeneous) {
    rep.mu = {intensity * rep.lebesgue.value, intensity * rep.lebesgue.se,
              MethodTag::monte_carlo};
  } else {
    const auto member = [&](const Point& q) {
      return cell_membership(q, nucleus, cloud, exclude);
    };
    const McMeasure m = predicate_measure_mc(density, member, n_samples, rng);
    rep.mu = {m.estimate, m.se, MethodTag::monte_carlo};
  }
  return rep;
}

Generators2D collect_generators_2d(const Point& nucleus, const PointCloud& cloud,
                                   std::optional<std::size_t> exclude) {
  Generators2D g;
  g.nucleus = {nucleus[0], nucleus[1]};
  g.others.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (exclude && *exclude == i) continue;
    const auto p = cloud.at(i);
    // Exact duplicates of the nucleus never constrain a closed cell.
    if (p[0] == nucleus[0] && p[1] == nucleus[1]) continue;
    g.others.push_back({p[0], p[1]});
  }
  return g;
}

CellReport resolve_with_cloud(const Point& probe, const PointCloud& cloud, CellMode mode,
                              const Density& density, bool homogeneous, double intensity,
                              RngStream& rng, const ResolveOptions& opts) {
  const int d = static_cast<int>(probe.size());
  Point nucleus = probe;
  long nucleus_index = -1;
  std::optional<std::size_t> exclude;
  if (mode == CellMode::containing) {
    if (cloud.size() == 0) throw std::invalid_argument("resolve_cell: containing needs points");
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double dd = dist_sq(cloud.at(i), probe);
      if (dd < bd) {
        bd = dd;
        best = i;
      }
    }
    nucleus = cloud.point(best);
    nucleus_index = static_cast<long>(best);
    exclude = best;
  }

  const long other_count =
      static_cast<long>(cloud.size()) - (exclude.has_value() ? 1 : 0);
  if (other_count <= 0) {
    return whole_space_report(nucleus, nucleus_index, d, density, homogeneous, intensity,
                              opts);
  }

  if (d == 1) {
    PointCloud others;
    others.dim = 1;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (exclude && *exclude == i) continue;
      others.push(cloud.at(i));
    }
    return resolve_cell_1d(nucleus, nucleus_index, others, density, homogeneous,
                           intensity, opts);
  }
  if (d == 2) {
    const Generators2D gens = collect_generators_2d(nucleus, cloud, exclude);
    if (gens.others.empty()) {
      return whole_space_report(nucleus, nucleus_index, d, density, homogeneous, intensity,
                                opts);
    }
    return resolve_cell_2d(nucleus, nucleus_index, gens, density, homogeneous, intensity,
                           opts);
  }
  return resolve_cell_nd(nucleus, nucleus_index, cloud, exclude, density, homogeneous,
                         intensity, rng, opts);
}

}  // namespace

CellReport resolve_cell(const CellQuery& query, const Density& density, RngStream& rng,
                        const ResolveOptions& opts) {
  const int d = static_cast<int>(query.probe.size());
  if (d < 1) throw std::invalid_argument("resolve_cell: empty probe");
  for (double c : query.probe) {
    if (!std::isfinite(c)) throw std::invalid_argument("resolve_cell: non-finite probe");
  }

  if (query.mode == CellMode::poisson_typical) {
    if (!(query.intensity > 0.0)) {
      throw std::invalid_argument("resolve_cell: poisson_typical needs intensity > 0");
    }
    if (!std::isfinite(query.intensity)) {
      throw std::invalid_argument("resolve_cell: non-finite intensity");
    }
    const double vd = unit_ball_volume(d);
    double r_win =
        std::pow(opts.poisson_window_target / (query.intensity * vd), 1.0 / d);
    Window win = Window::ball(query.probe, r_win);
    PointCloud cloud = sample_poisson(query.intensity, win, rng);
    for (int attempt = 0;; ++attempt) {
      CellReport rep = resolve_with_cloud(query.probe, cloud, CellMode::fixed_nucleus,
                                          density, /*homogeneous=*/true, query.intensity,
                                          rng, opts);
      const bool local = !rep.truncated && rep.diameter <= 0.5 * r_win;
      if (local) return rep;
      if (attempt >= opts.max_window_doublings) {
        rep.truncated = true;
        return rep;
      }
      Window bigger = Window::ball(query.probe, 2.0 * r_win);
      cloud = extend_poisson(cloud, query.intensity, win, bigger, rng);
      win = bigger;
      r_win *= 2.0;
    }
  }

  if (query.cloud == nullptr) throw std::invalid_argument("resolve_cell: missing cloud");
  if (query.cloud->size() > 0 && query.cloud->dim != d) {
    throw std::invalid_argument("resolve_cell: cloud dimension mismatch");
  }
  if (!(density.dimension() == d)) {
    throw std::invalid_argument("resolve_cell: density dimension mismatch");
  }
  return resolve_with_cloud(query.probe, *query.cloud, query.mode, density,
                            /*homogeneous=*/false, 0.0, rng, opts);
}

}  // namespace vorsim
