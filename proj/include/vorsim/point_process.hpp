#pragma once

#include <span>
#include <variant>
#include <vector>

#include "vorsim/density.hpp"
#include "vorsim/geom.hpp"
#include "vorsim/rng.hpp"

namespace vorsim {

// Ordered realization of a finite point process. Flat row-major storage;
// indices are identities and are used for tie-breaking.
struct PointCloud {
  int dim = 0;
  std::vector<double> data;

  std::size_t size() const { return dim == 0 ? 0 : data.size() / static_cast<std::size_t>(dim); }
  std::span<const double> at(std::size_t i) const {
    return {data.data() + static_cast<std::size_t>(dim) * i, static_cast<std::size_t>(dim)};
  }
  Point point(std::size_t i) const {
    const auto s = at(i);
    return Point(s.begin(), s.end());
  }
  void push(std::span<const double> p) { data.insert(data.end(), p.begin(), p.end()); }
};

// Bounded simulation region: axis-aligned box or ball.
class Window {
 public:
  static Window box(Point lo, Point hi);
  static Window ball(Point center, double radius);

  int dimension() const;
  double volume() const;
  bool contains(std::span<const double> p) const;
  bool contains_window(const Window& inner) const;
  Point sample_uniform(RngStream& rng) const;

  const Ball* as_ball() const { return std::get_if<Ball>(&v_); }

 private:
  struct Box {
    Point lo, hi;
  };
  explicit Window(std::variant<Box, Ball> v) : v_(std::move(v)) {}
  std::variant<Box, Ball> v_;
};

// n i.i.d. draws from the density, order recorded.
PointCloud sample_iid(const Density& density, long n, RngStream& rng);

// Homogeneous Poisson process restricted to the window: the count is
// Poisson(intensity * volume), locations i.i.d. uniform.
PointCloud sample_poisson(double intensity, const Window& window, RngStream& rng);

// Superposes an independent Poisson sample on outer \ inner onto an existing
// realization sampled on inner at the same intensity. The annulus is sampled
// by rejection from the outer window. Windows must be nested.
PointCloud extend_poisson(const PointCloud& existing, double intensity, const Window& inner,
                          const Window& outer, RngStream& rng);

// Number of cloud points strictly inside the open ball.
long count_in_ball(const PointCloud& cloud, const Ball& ball);

// Chernoff bound e^{phi(t)} with phi(t) = t - np - t ln(t/(np)). Upper-bounds
// P(Bin(n,p) >= t) for t >= np and P(Bin(n,p) <= t) for 0 < t <= np.
double chernoff_bound(long n, double p, double t);

}  // namespace vorsim
