#include "vorsim/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "vorsim/numerics.hpp"

namespace vorsim {

namespace {

double box_volume(const Point& lo, const Point& hi) {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

double box_overlap_volume(const Point& alo, const Point& ahi, const Point& blo,
                          const Point& bhi) {
  double v = 1.0;
  for (std::size_t i = 0; i < alo.size(); ++i) {
    const double w = std::min(ahi[i], bhi[i]) - std::max(alo[i], blo[i]);
    if (w <= 0.0) return 0.0;
    v *= w;
  }
  return v;
}

// 7-point symmetric triangle rule, degree 5.
struct TriRulePoint {
  double a, b, c, w;
};
constexpr TriRulePoint kTriRule[7] = {
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
};

double triangle_area(Vec2 a, Vec2 b, Vec2 c) {
  return 0.5 * std::fabs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

template <typename F>
double integrate_triangle(Vec2 a, Vec2 b, Vec2 c, int levels, const F& f) {
  if (levels <= 0) {
    const double area = triangle_area(a, b, c);
    double s = 0.0;
    for (const TriRulePoint& p : kTriRule) {
      s += p.w * f(p.a * a.x + p.b * b.x + p.c * c.x, p.a * a.y + p.b * b.y + p.c * c.y);
    }
    return s * area;
  }
  const Vec2 ab{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  const Vec2 bc{0.5 * (b.x + c.x), 0.5 * (b.y + c.y)};
  const Vec2 ca{0.5 * (c.x + a.x), 0.5 * (c.y + a.y)};
  return integrate_triangle(a, ab, ca, levels - 1, f) +
         integrate_triangle(ab, b, bc, levels - 1, f) +
         integrate_triangle(ca, bc, c, levels - 1, f) +
         integrate_triangle(ab, bc, ca, levels - 1, f);
}

template <typename F>
double integrate_polygon(std::span<const Vec2> vertices, int levels, const F& f) {
  if (vertices.size() < 3) return 0.0;
  Vec2 centroid{0.0, 0.0};
  for (const Vec2& v : vertices) {
    centroid.x += v.x;
    centroid.y += v.y;
  }
  centroid.x /= static_cast<double>(vertices.size());
  centroid.y /= static_cast<double>(vertices.size());
  double s = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const std::size_t j = (i + 1) % vertices.size();
    s += integrate_triangle(centroid, vertices[i], vertices[j], levels, f);
  }
  return s;
}

std::size_t grid_cell_count(const GridDensity& g) {
  std::size_t n = 1;
  for (std::size_t d : g.dims) n *= d;
  return n;
}

// Cell index -> per-axis indices. Row-major: the first dim varies slowest.
void grid_cell_coords(const GridDensity& g, std::size_t idx, std::vector<std::size_t>& out) {
  out.resize(g.dims.size());
  for (std::size_t ax = g.dims.size(); ax-- > 0;) {
    out[ax] = idx % g.dims[ax];
    idx /= g.dims[ax];
  }
}

// For d = 2, dims = {rows, cols}: row index moves along coordinate 1 (y),
// column index along coordinate 0 (x).
void grid_cell_bounds(const GridDensity& g, const std::vector<std::size_t>& coords,
                      Point& lo, Point& hi) {
  const std::size_t d = g.dims.size();
  lo.resize(d);
  hi.resize(d);
  if (d == 2) {
    lo[0] = g.origin[0] + static_cast<double>(coords[1]) * g.cell_size;
    lo[1] = g.origin[1] + static_cast<double>(coords[0]) * g.cell_size;
  } else {
    for (std::size_t ax = 0; ax < d; ++ax) {
      lo[ax] = g.origin[ax] + static_cast<double>(coords[ax]) * g.cell_size;
    }
  }
  for (std::size_t ax = 0; ax < d; ++ax) hi[ax] = lo[ax] + g.cell_size;
}

long grid_lookup(const GridDensity& g, const Point& x) {
  const std::size_t d = g.dims.size();
  // Per-axis cell coordinate; coordinate axis 0 maps to the column axis when
  // d == 2 (see grid_cell_bounds).
  std::vector<std::size_t> cell(d, 0);
  for (std::size_t ax = 0; ax < d; ++ax) {
    const std::size_t dim_ax = (d == 2) ? (1 - ax) : ax;
    const double rel = (x[ax] - g.origin[ax]) / g.cell_size;
    if (rel < 0.0) return -1;
    const auto c = static_cast<std::size_t>(rel);
    if (c >= g.dims[dim_ax]) return -1;
    cell[dim_ax] = c;
  }
  std::size_t idx = 0;
  for (std::size_t ax = 0; ax < d; ++ax) idx = idx * g.dims[ax] + cell[ax];
  return static_cast<long>(idx);
}

}  // namespace

Density Density::uniform_box(Point lo, Point hi) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw std::invalid_argument("uniform_box: bad corner dimensions");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("uniform_box: lo must be < hi");
  }
  UniformBoxDensity b{lo, hi, 0.0};
  b.value = 1.0 / box_volume(lo, hi);
  const int d = static_cast<int>(lo.size());
  return Density(d, std::move(b));
}

Density Density::isotropic_gaussian(Point mean, double sigma) {
  if (mean.empty()) throw std::invalid_argument("isotropic_gaussian: empty mean");
  if (!(sigma > 0.0)) throw std::invalid_argument("isotropic_gaussian: sigma must be > 0");
  const int d = static_cast<int>(mean.size());
  return Density(d, IsotropicGaussianDensity{std::move(mean), sigma});
}

Density Density::mixture(std::vector<double> weights, std::vector<Density> components) {
  if (weights.size() != components.size() || weights.empty()) {
    throw std::invalid_argument("mixture: weights/components size mismatch");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("mixture: weights sum to zero");
  const int d = components.front().dimension();
  MixtureDensity m;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (components[i].dimension() != d) {
      throw std::invalid_argument("mixture: component dimension mismatch");
    }
    m.weights.push_back(weights[i] / total);
    m.components.push_back(std::make_shared<const Density>(std::move(components[i])));
  }
  double acc = 0.0;
  for (double w : m.weights) {
    acc += w;
    m.cumulative.push_back(acc);
  }
  m.cumulative.back() = 1.0;
  return Density(d, std::move(m));
}

Density Density::grid(Point origin, double cell_size, std::vector<std::size_t> dims,
                      std::vector<double> raw_values) {
  if (origin.size() != dims.size() || dims.empty()) {
    throw std::invalid_argument("grid: origin/dims dimension mismatch");
  }
  if (!(cell_size > 0.0)) throw std::invalid_argument("grid: cell_size must be > 0");
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("grid: zero-sized axis");
    n *= d;
  }
  if (raw_values.size() != n) throw std::invalid_argument("grid: value count mismatch");
  double total = 0.0;
  for (double v : raw_values) {
    if (!(v >= 0.0)) throw std::invalid_argument("grid: negative value");
    total += v;
  }
  if (!(total > 0.0)) throw std::invalid_argument("grid: all values zero");
  const int d = static_cast<int>(dims.size());
  const double cell_vol = std::pow(cell_size, d);
  // Rescale so the density integrates to 1.
  const double scale = 1.0 / (total * cell_vol);
  GridDensity g{std::move(origin), cell_size, std::move(dims), std::move(raw_values), {}};
  for (double& v : g.values) v *= scale;
  g.cumulative.resize(g.values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    acc += g.values[i] * cell_vol;
    g.cumulative[i] = acc;
  }
  g.cumulative.back() = 1.0;
  return Density(d, std::move(g));
}

Density Density::grid_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("grid_from_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("grid_from_csv: empty file");
  auto split = [](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.find_first_not_of(" \t\r") == std::string::npos) continue;
      out.push_back(std::stod(tok));
    }
    return out;
  };
  const std::vector<double> header = split(line);
  if (header.size() < 3) throw std::runtime_error("grid_from_csv: short header");
  const int d = static_cast<int>(header[0]);
  if (d < 1 || d > 2) throw std::runtime_error("grid_from_csv: d must be 1 or 2");
  if (header.size() != static_cast<std::size_t>(2 + d)) {
    throw std::runtime_error("grid_from_csv: header must be d,cell_size,origin...");
  }
  const double cell_size = header[1];
  Point origin(header.begin() + 2, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r = split(line);
    if (!r.empty()) rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::runtime_error("grid_from_csv: no values");
  if (d == 1) {
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return grid(std::move(origin), cell_size, {flat.size()}, std::move(flat));
  }
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw std::runtime_error("grid_from_csv: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return grid(std::move(origin), cell_size, {rows.size(), cols}, std::move(flat));
}

double Density::eval(const Point& x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("density eval: dimension mismatch");
  }
  if (const auto* b = std::get_if<UniformBoxDensity>(&v_)) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < b->lo[i] || x[i] > b->hi[i]) return 0.0;
    }
    return b->value;
  }
  if (const auto* g = std::get_if<IsotropicGaussianDensity>(&v_)) {
    const double r2 = dist_sq(x, g->mean);
    const double s2 = g->sigma * g->sigma;
    return std::exp(-0.5 * r2 / s2) /
           std::pow(6.283185307179586 * s2, 0.5 * static_cast<double>(dim_));
  }
  if (const auto* m = std::get_if<MixtureDensity>(&v_)) {
    double s = 0.0;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      s += m->weights[i] * m->components[i]->eval(x);
    }
    return s;
  }
  const auto& g = std::get<GridDensity>(v_);
  const long idx = grid_lookup(g, x);
  return idx < 0 ? 0.0 : g.values[static_cast<std::size_t>(idx)];
}

Point Density::sample(RngStream& rng) const {
  if (const auto* b = std::get_if<UniformBoxDensity>(&v_)) {
    Point p(dim_);
    for (int i = 0; i < dim_; ++i) p[i] = rng.uniform(b->lo[i], b->hi[i]);
    return p;
  }
  if (const auto* g = std::get_if<IsotropicGaussianDensity>(&v_)) {
    Point p(dim_);
    for (int i = 0; i < dim_; ++i) p[i] = g->mean[i] + g->sigma * rng.normal();
    return p;
  }
  if (const auto* m = std::get_if<MixtureDensity>(&v_)) {
    const double u = rng.u01();
    const auto it = std::upper_bound(m->cumulative.begin(), m->cumulative.end(), u);
    const auto k = static_cast<std::size_t>(
        std::min(it - m->cumulative.begin(),
                 static_cast<std::ptrdiff_t>(m->cumulative.size() - 1)));
    return m->components[k]->sample(rng);
  }
  const auto& g = std::get<GridDensity>(v_);
  const double u = rng.u01();
  const auto it = std::upper_bound(g.cumulative.begin(), g.cumulative.end(), u);
  const auto idx = static_cast<std::size_t>(
      std::min(it - g.cumulative.begin(),
               static_cast<std::ptrdiff_t>(g.cumulative.size() - 1)));
  std::vector<std::size_t> coords;
  grid_cell_coords(g, idx, coords);
  Point lo, hi;
  grid_cell_bounds(g, coords, lo, hi);
  Point p(dim_);
  for (int i = 0; i < dim_; ++i) p[i] = rng.uniform(lo[i], hi[i]);
  return p;
}

double Density::ball_measure(const Ball& ball) const {
  if (static_cast<int>(ball.center.size()) != dim_) {
    throw std::invalid_argument("ball_measure: dimension mismatch");
  }
  if (ball.radius <= 0.0) return 0.0;
  if (const auto* b = std::get_if<UniformBoxDensity>(&v_)) {
    return b->value * ball_box_overlap_volume(ball, b->lo, b->hi);
  }
  if (const auto* g = std::get_if<IsotropicGaussianDensity>(&v_)) {
    const double s2 = g->sigma * g->sigma;
    const double lambda = dist_sq(ball.center, g->mean) / s2;
    const double x = ball.radius * ball.radius / s2;
    return noncentral_chi_square_cdf(static_cast<double>(dim_), lambda, x);
  }
  if (const auto* m = std::get_if<MixtureDensity>(&v_)) {
    double s = 0.0;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      s += m->weights[i] * m->components[i]->ball_measure(ball);
    }
    return std::fmin(s, 1.0);
  }
  const auto& g = std::get<GridDensity>(v_);
  double mass = 0.0;
  std::vector<std::size_t> coords;
  Point lo, hi;
  const std::size_t n = grid_cell_count(g);
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (g.values[idx] == 0.0) continue;
    grid_cell_coords(g, idx, coords);
    grid_cell_bounds(g, coords, lo, hi);
    // Skip cells clearly outside the ball's bounding box.
    bool overlap_possible = true;
    for (int ax = 0; ax < dim_; ++ax) {
      if (hi[ax] <= ball.center[ax] - ball.radius || lo[ax] >= ball.center[ax] + ball.radius) {
        overlap_possible = false;
        break;
      }
    }
    if (!overlap_possible) continue;
    mass += g.values[idx] * ball_box_overlap_volume(ball, lo, hi);
  }
  return std::fmin(mass, 1.0);
}

double Density::box_measure(const Point& qlo, const Point& qhi) const {
  if (static_cast<int>(qlo.size()) != dim_ || static_cast<int>(qhi.size()) != dim_) {
    throw std::invalid_argument("box_measure: dimension mismatch");
  }
  for (int i = 0; i < dim_; ++i) {
    if (qhi[i] <= qlo[i]) return 0.0;
  }
  if (const auto* b = std::get_if<UniformBoxDensity>(&v_)) {
    return b->value * box_overlap_volume(qlo, qhi, b->lo, b->hi);
  }
  if (const auto* g = std::get_if<IsotropicGaussianDensity>(&v_)) {
    double p = 1.0;
    for (int i = 0; i < dim_; ++i) {
      p *= normal_cdf((qhi[i] - g->mean[i]) / g->sigma) -
           normal_cdf((qlo[i] - g->mean[i]) / g->sigma);
    }
    return p;
  }
  if (const auto* m = std::get_if<MixtureDensity>(&v_)) {
    double s = 0.0;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      s += m->weights[i] * m->components[i]->box_measure(qlo, qhi);
    }
    return std::fmin(s, 1.0);
  }
  const auto& g = std::get<GridDensity>(v_);
  double mass = 0.0;
  std::vector<std::size_t> coords;
  Point lo, hi;
  const std::size_t n = grid_cell_count(g);
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (g.values[idx] == 0.0) continue;
    grid_cell_coords(g, idx, coords);
    grid_cell_bounds(g, coords, lo, hi);
    mass += g.values[idx] * box_overlap_volume(qlo, qhi, lo, hi);
  }
  return std::fmin(mass, 1.0);
}

double Density::polygon_measure(const ConvexPolygon& poly) const {
  if (dim_ != 2) throw std::invalid_argument("polygon_measure: d = 2 only");
  if (poly.size() < 3) return 0.0;
  if (const auto* b = std::get_if<UniformBoxDensity>(&v_)) {
    const BoundingBox2 rect{b->lo[0], b->lo[1], b->hi[0], b->hi[1]};
    const std::vector<Vec2> clipped = clip_polygon_to_rect(poly.vertices, rect);
    return b->value * polygon_area(clipped);
  }
  if (const auto* g = std::get_if<IsotropicGaussianDensity>(&v_)) {
    const double s2 = g->sigma * g->sigma;
    const double mx = g->mean[0], my = g->mean[1];
    const double c = 1.0 / (6.283185307179586 * s2);
    return integrate_polygon(poly.vertices, 2, [&](double x, double y) {
      const double dx = x - mx, dy = y - my;
      return c * std::exp(-0.5 * (dx * dx + dy * dy) / s2);
    });
  }
  if (const auto* m = std::get_if<MixtureDensity>(&v_)) {
    double s = 0.0;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      s += m->weights[i] * m->components[i]->polygon_measure(poly);
    }
    return std::fmin(s, 1.0);
  }
  const auto& g = std::get<GridDensity>(v_);
  double xlo = poly.vertices[0].x, xhi = xlo, ylo = poly.vertices[0].y, yhi = ylo;
  for (const Vec2& v : poly.vertices) {
    xlo = std::min(xlo, v.x);
    xhi = std::max(xhi, v.x);
    ylo = std::min(ylo, v.y);
    yhi = std::max(yhi, v.y);
  }
  double mass = 0.0;
  std::vector<std::size_t> coords;
  Point lo, hi;
  const std::size_t n = grid_cell_count(g);
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (g.values[idx] == 0.0) continue;
    grid_cell_coords(g, idx, coords);
    grid_cell_bounds(g, coords, lo, hi);
    if (hi[0] <= xlo || lo[0] >= xhi || hi[1] <= ylo || lo[1] >= yhi) continue;
    const BoundingBox2 rect{lo[0], lo[1], hi[0], hi[1]};
    const std::vector<Vec2> clipped = clip_polygon_to_rect(poly.vertices, rect);
    mass += g.values[idx] * polygon_area(clipped);
  }
  return std::fmin(mass, 1.0);
}

McMeasure predicate_measure_mc(const Density& density,
                               const std::function<bool(const Point&)>& member,
                               long n_samples, RngStream& rng) {
  if (n_samples < 1) throw std::invalid_argument("predicate_measure_mc: n_samples >= 1");
  long hits = 0;
  for (long i = 0; i < n_samples; ++i) {
    if (member(density.sample(rng))) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples))};
}

}  // namespace vorsim
