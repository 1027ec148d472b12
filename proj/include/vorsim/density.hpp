#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "vorsim/geom.hpp"
#include "vorsim/polygon.hpp"
#include "vorsim/rng.hpp"

namespace vorsim {

class Density;

struct UniformBoxDensity {
  Point lo, hi;
  double value = 0.0;  // 1 / volume
};

struct IsotropicGaussianDensity {
  Point mean;
  double sigma = 1.0;
};

struct MixtureDensity {
  std::vector<double> weights;  // sum to 1 after construction
  std::vector<std::shared_ptr<const Density>> components;
  std::vector<double> cumulative;
};

// Piecewise-constant density on a regular grid. Values are rescaled at
// construction so that sum(values) * cell_size^d = 1. For d = 2 the flat
// array is row-major: index = row * cols + col, row along the second
// coordinate.
struct GridDensity {
  Point origin;
  double cell_size = 1.0;
  std::vector<std::size_t> dims;  // d entries
  std::vector<double> values;
  std::vector<double> cumulative;  // cell mass prefix sums for sampling
};

// An evaluable probability density with a sampler and measure oracles.
// Immutable after construction; all operations are pure.
class Density {
 public:
  static Density uniform_box(Point lo, Point hi);
  static Density isotropic_gaussian(Point mean, double sigma);
  static Density mixture(std::vector<double> weights, std::vector<Density> components);
  static Density grid(Point origin, double cell_size, std::vector<std::size_t> dims,
                      std::vector<double> raw_values);
  // CSV: header "d,cell_size,origin_1,...,origin_d"; body rows hold the
  // flattened values (row-major; for d = 2 one line per grid row).
  static Density grid_from_csv(const std::string& path);

  int dimension() const { return dim_; }

  double eval(const Point& x) const;
  Point sample(RngStream& rng) const;

  // mu_f of the open ball; exact branches per variant (interval / disk-rect
  // decomposition, noncentral chi-square series), MC fallback for d >= 3
  // boxes and grids.
  double ball_measure(const Ball& ball) const;

  // mu_f of an axis-aligned box; exact for every variant in every dimension.
  double box_measure(const Point& lo, const Point& hi) const;

  // mu_f of a convex polygon (d = 2): exact rectangle clipping for the
  // piecewise-constant variants, fixed-order Gauss quadrature for the
  // Gaussian. Effectively exact for the cell sizes that occur here.
  double polygon_measure(const ConvexPolygon& poly) const;

  bool is_uniform_box() const { return std::holds_alternative<UniformBoxDensity>(v_); }

 private:
  Density(int dim, std::variant<UniformBoxDensity, IsotropicGaussianDensity, MixtureDensity,
                                GridDensity> v)
      : dim_(dim), v_(std::move(v)) {}

  int dim_ = 0;
  std::variant<UniformBoxDensity, IsotropicGaussianDensity, MixtureDensity, GridDensity> v_;
};

struct McMeasure {
  double estimate = 0.0;
  double se = 0.0;
};

// Unbiased cell-measure estimator: the measure of {member} equals the hit
// probability of a fresh draw from the density.
McMeasure predicate_measure_mc(const Density& density,
                               const std::function<bool(const Point&)>& member,
                               long n_samples, RngStream& rng);

}  // namespace vorsim
