#pragma once

#include <optional>
#include <utility>

#include "vorsim/density.hpp"
#include "vorsim/point_process.hpp"
#include "vorsim/polygon.hpp"

namespace vorsim {

// The three cell notions: the cell with fixed nucleus x among {x} ∪ cloud,
// the cell of the cloud's diagram containing x, and the cell with nucleus x
// when the other generators form a homogeneous Poisson process.
enum class CellMode { fixed_nucleus, containing, poisson_typical };

enum class MethodTag { exact, quadrature, monte_carlo };

const char* method_name(MethodTag m);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  MethodTag method = MethodTag::exact;
};

struct CellQuery {
  CellMode mode = CellMode::fixed_nucleus;
  Point probe;
  const PointCloud* cloud = nullptr;  // ignored for poisson_typical
  double intensity = 0.0;             // poisson_typical only
};

struct ResolveOptions {
  // d = 2: fixed clip box instead of the adaptive one.
  std::optional<BoundingBox2> fixed_clip;
  // Adaptive clip: start at factor * (second-nearest distance), double on
  // clip contact, give up after max_clip_doublings and set truncated.
  double clip_halfwidth_factor = 4.0;
  int max_clip_doublings = 8;
  // poisson_typical: initial window sized for this expected point count, then
  // enlarged via superposition until the cell diameter is at most half the
  // window radius (the locality condition).
  double poisson_window_target = 64.0;
  int max_window_doublings = 8;
  // Sample counts for the d >= 3 Monte Carlo measures.
  long mc_measure_samples = 20000;
  bool keep_polygon = false;
};

struct CellReport {
  Point nucleus;
  long nucleus_index = -1;  // -1 when the probe itself is the nucleus
  // mu_f(cell); for poisson_typical this is the homogeneous mass
  // intensity * lambda(cell), the analogue of n * mu_f at intensity n f(x).
  Estimate mu;
  Estimate lebesgue;
  double diameter = 0.0;
  MethodTag diameter_method = MethodTag::exact;
  int edge_count = -1;  // bisector edges; exact d = 2 paths only
  bool truncated = false;
  long generator_count = 0;
  std::optional<ConvexPolygon> polygon;                 // d = 2, on request
  std::optional<std::pair<double, double>> interval;    // d = 1
};

struct NearestTwo {
  std::size_t i1 = 0;
  double d1 = 0.0;
  std::size_t i2 = 0;
  double d2 = 0.0;
};

// Nearest and second-nearest cloud point to x; ties resolved to the smaller
// index. Requires at least two points.
NearestTwo nearest_two(const Point& x, const PointCloud& cloud);

// Closed-cell membership: ||q - nucleus|| <= ||q - X_j|| for every j except
// `exclude` (the nucleus's own index).
bool cell_membership(const Point& q, const Point& nucleus, const PointCloud& cloud,
                     std::optional<std::size_t> exclude = std::nullopt);

// Resolves the queried cell: exact interval in d = 1, exact polygon in d = 2,
// Monte Carlo measures in higher dimensions.
CellReport resolve_cell(const CellQuery& query, const Density& density, RngStream& rng,
                        const ResolveOptions& opts = {});

// Sub-cloud strictly inside B_{x,t}, original order preserved. Contract: if
// the pruned cell's diameter is at most t/2 (fixed-nucleus) or t/4
// (containing), the pruned cell equals the full-cloud cell.
PointCloud prune_outside(const Point& x, double t, const PointCloud& cloud, CellMode mode);

}  // namespace vorsim
