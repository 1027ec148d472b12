#pragma once

#include <span>
#include <vector>

#include "vorsim/geom.hpp"

namespace vorsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct BoundingBox2 {
  double xlo = 0.0, ylo = 0.0, xhi = 0.0, yhi = 0.0;

  double diag() const;
  bool contains(double x, double y) const;
  static BoundingBox2 centered(Vec2 c, double halfwidth);
};

// Edge tag: index >= 0 names the generator whose bisector supports the edge,
// kClipEdge marks an edge inherited from the clip boundary.
constexpr int kClipEdge = -1;

// Convex polygon in CCW order. tags[i] belongs to the edge from vertices[i]
// to vertices[(i+1) % n].
struct ConvexPolygon {
  std::vector<Vec2> vertices;
  std::vector<int> tags;

  std::size_t size() const { return vertices.size(); }
};

struct PolygonMetrics {
  double area = 0.0;
  double diameter = 0.0;
  int bisector_edge_count = 0;
  bool touches_clip = false;
};

// Intersection of the clip box with all half-planes
// { p : ||p - nucleus|| <= ||p - other_j|| }, by incremental convex clipping.
// Surviving edges carry the index of the generating point, or kClipEdge. An
// edge supported by both a bisector and the clip boundary is tagged bisector.
// The nucleus must lie inside the clip box; an `other` coinciding with the
// nucleus is an error.
ConvexPolygon halfplane_intersection_2d(Vec2 nucleus, std::span<const Vec2> others,
                                        const BoundingBox2& clip_box);

// Shoelace area, max pairwise vertex distance, bisector edge count, clip
// contact flag. Fewer than 3 vertices is a degenerate-polygon error.
PolygonMetrics polygon_metrics(const ConvexPolygon& poly);

// Signed shoelace area; 0 for fewer than 3 vertices.
double polygon_area(std::span<const Vec2> vertices);

// poly ∩ [xlo,xhi] x [ylo,yhi]; tags are dropped. May return an empty polygon.
std::vector<Vec2> clip_polygon_to_rect(std::span<const Vec2> vertices,
                                       const BoundingBox2& rect);

// Conversions between Point (d = 2) and Vec2.
Vec2 to_vec2(std::span<const double> p);
Point to_point(Vec2 v);

}  // namespace vorsim
