#include "vorsim/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vorsim {

double BoundingBox2::diag() const {
  const double dx = xhi - xlo;
  const double dy = yhi - ylo;
  return std::sqrt(dx * dx + dy * dy);
}

bool BoundingBox2::contains(double x, double y) const {
  return x >= xlo && x <= xhi && y >= ylo && y <= yhi;
}

BoundingBox2 BoundingBox2::centered(Vec2 c, double halfwidth) {
  return {c.x - halfwidth, c.y - halfwidth, c.x + halfwidth, c.y + halfwidth};
}

Vec2 to_vec2(std::span<const double> p) { return {p[0], p[1]}; }
Point to_point(Vec2 v) { return {v.x, v.y}; }

namespace {

struct HalfPlane {
  // a . p <= b
  double ax, ay, b;
  double residual(Vec2 v) const { return ax * v.x + ay * v.y - b; }
};

// Clips `poly` against the half-plane; the freshly cut edge gets `tag`.
// Edges that end up lying on the cut line are retagged to `tag` as well
// (bisector wins over clip when the two coincide). `on_tol` decides when a
// vertex counts as on the line.
void clip_against(ConvexPolygon& poly, const HalfPlane& hp, int tag, double on_tol) {
  const std::size_t n = poly.size();
  if (n == 0) return;

  static thread_local std::vector<double> res;
  res.resize(n);
  bool any_out = false;
  for (std::size_t i = 0; i < n; ++i) {
    res[i] = hp.residual(poly.vertices[i]);
    if (res[i] > on_tol) any_out = true;
  }
  if (!any_out) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      if (std::fabs(res[i]) <= on_tol && std::fabs(res[j]) <= on_tol) poly.tags[i] = tag;
    }
    return;
  }

  std::vector<Vec2> out_v;
  std::vector<int> out_t;
  out_v.reserve(n + 2);
  out_t.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const bool in_i = res[i] <= on_tol;
    const bool in_j = res[j] <= on_tol;
    if (in_i && in_j) {
      out_v.push_back(poly.vertices[i]);
      out_t.push_back(poly.tags[i]);
    } else if (in_i && !in_j) {
      out_v.push_back(poly.vertices[i]);
      out_t.push_back(poly.tags[i]);
      const double t = res[i] / (res[i] - res[j]);
      out_v.push_back({poly.vertices[i].x + t * (poly.vertices[j].x - poly.vertices[i].x),
                       poly.vertices[i].y + t * (poly.vertices[j].y - poly.vertices[i].y)});
      out_t.push_back(tag);
    } else if (!in_i && in_j) {
      const double t = res[i] / (res[i] - res[j]);
      out_v.push_back({poly.vertices[i].x + t * (poly.vertices[j].x - poly.vertices[i].x),
                       poly.vertices[i].y + t * (poly.vertices[j].y - poly.vertices[i].y)});
      out_t.push_back(poly.tags[i]);
    }
  }
  poly.vertices = std::move(out_v);
  poly.tags = std::move(out_t);
}

// Removes near-duplicate and collinear vertices. When two edges merge, the
// bisector tag wins over clip; otherwise the longer edge keeps its tag.
void cleanup(ConvexPolygon& poly, double tol) {
  bool changed = true;
  while (changed && poly.size() >= 3) {
    changed = false;
    const std::size_t n = poly.size();
    // Duplicate pass.
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const double dx = poly.vertices[j].x - poly.vertices[i].x;
      const double dy = poly.vertices[j].y - poly.vertices[i].y;
      if (std::sqrt(dx * dx + dy * dy) <= tol) {
        // Edge i is degenerate: the merged vertex keeps position i and the
        // outgoing tag of j.
        poly.tags[i] = poly.tags[j];
        poly.vertices.erase(poly.vertices.begin() + static_cast<long>(j));
        poly.tags.erase(poly.tags.begin() + static_cast<long>(j));
        changed = true;
        break;
      }
    }
    if (changed) continue;
    // Collinear pass: drop vertex w when (u -> w -> z) is straight.
    for (std::size_t w = 0; w < poly.size(); ++w) {
      const std::size_t u = (w + poly.size() - 1) % poly.size();
      const std::size_t z = (w + 1) % poly.size();
      const double ax = poly.vertices[w].x - poly.vertices[u].x;
      const double ay = poly.vertices[w].y - poly.vertices[u].y;
      const double bx = poly.vertices[z].x - poly.vertices[w].x;
      const double by = poly.vertices[z].y - poly.vertices[w].y;
      const double cross = ax * by - ay * bx;
      const double len_uz = std::hypot(poly.vertices[z].x - poly.vertices[u].x,
                                       poly.vertices[z].y - poly.vertices[u].y);
      if (std::fabs(cross) <= tol * std::max(len_uz, 1e-300) && (ax * bx + ay * by) >= 0.0) {
        int keep;
        const int tu = poly.tags[u];
        const int tw = poly.tags[w];
        if (tu == tw) {
          keep = tu;
        } else if (tu == kClipEdge) {
          keep = tw;
        } else if (tw == kClipEdge) {
          keep = tu;
        } else {
          const double lu = std::hypot(ax, ay);
          const double lw = std::hypot(bx, by);
          keep = lu >= lw ? tu : tw;
        }
        poly.tags[u] = keep;
        poly.vertices.erase(poly.vertices.begin() + static_cast<long>(w));
        poly.tags.erase(poly.tags.begin() + static_cast<long>(w));
        changed = true;
        break;
      }
    }
  }
}

}  // namespace

ConvexPolygon halfplane_intersection_2d(Vec2 nucleus, std::span<const Vec2> others,
                                        const BoundingBox2& clip_box) {
  if (!clip_box.contains(nucleus.x, nucleus.y)) {
    throw std::invalid_argument("halfplane_intersection_2d: nucleus outside clip box");
  }
  ConvexPolygon poly;
  poly.vertices = {{clip_box.xlo, clip_box.ylo},
                   {clip_box.xhi, clip_box.ylo},
                   {clip_box.xhi, clip_box.yhi},
                   {clip_box.xlo, clip_box.yhi}};
  poly.tags = {kClipEdge, kClipEdge, kClipEdge, kClipEdge};

  const double diag = clip_box.diag();
  const double on_tol = 1e-12 * diag;

  for (std::size_t j = 0; j < others.size(); ++j) {
    const double ax = others[j].x - nucleus.x;
    const double ay = others[j].y - nucleus.y;
    if (ax == 0.0 && ay == 0.0) {
      throw std::invalid_argument("halfplane_intersection_2d: point coincides with nucleus");
    }
    const double b = ax * 0.5 * (nucleus.x + others[j].x) + ay * 0.5 * (nucleus.y + others[j].y);
    clip_against(poly, {ax, ay, b}, static_cast<int>(j), on_tol * std::hypot(ax, ay));
    if (poly.size() < 3) {
      throw std::logic_error("halfplane_intersection_2d: cell collapsed");
    }
  }

  cleanup(poly, 1e-9 * diag);
  if (poly.size() < 3 || polygon_area(poly.vertices) <= 0.0) {
    throw std::logic_error("halfplane_intersection_2d: degenerate cell");
  }
  return poly;
}

double polygon_area(std::span<const Vec2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    s += vertices[i].x * vertices[j].y - vertices[j].x * vertices[i].y;
  }
  return 0.5 * s;
}

PolygonMetrics polygon_metrics(const ConvexPolygon& poly) {
  if (poly.size() < 3) throw std::invalid_argument("polygon_metrics: fewer than 3 vertices");
  PolygonMetrics m;
  m.area = polygon_area(poly.vertices);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.size(); ++j) {
      const double dx = poly.vertices[i].x - poly.vertices[j].x;
      const double dy = poly.vertices[i].y - poly.vertices[j].y;
      m.diameter = std::max(m.diameter, dx * dx + dy * dy);
    }
  }
  m.diameter = std::sqrt(m.diameter);
  for (int t : poly.tags) {
    if (t == kClipEdge) {
      m.touches_clip = true;
    } else {
      ++m.bisector_edge_count;
    }
  }
  return m;
}

std::vector<Vec2> clip_polygon_to_rect(std::span<const Vec2> vertices,
                                       const BoundingBox2& rect) {
  std::vector<Vec2> cur(vertices.begin(), vertices.end());
  const HalfPlane planes[4] = {
      {-1.0, 0.0, -rect.xlo},
      {1.0, 0.0, rect.xhi},
      {0.0, -1.0, -rect.ylo},
      {0.0, 1.0, rect.yhi},
  };
  for (const HalfPlane& hp : planes) {
    if (cur.empty()) return cur;
    std::vector<Vec2> next;
    next.reserve(cur.size() + 2);
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const double ri = hp.residual(cur[i]);
      const double rj = hp.residual(cur[j]);
      const bool in_i = ri <= 0.0;
      const bool in_j = rj <= 0.0;
      if (in_i) next.push_back(cur[i]);
      if (in_i != in_j) {
        const double t = ri / (ri - rj);
        next.push_back({cur[i].x + t * (cur[j].x - cur[i].x),
                        cur[i].y + t * (cur[j].y - cur[i].y)});
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace vorsim
