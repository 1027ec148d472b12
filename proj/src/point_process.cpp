#include "vorsim/point_process.hpp"

#include <cmath>
#include <stdexcept>

namespace vorsim {

Window Window::box(Point lo, Point hi) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("Window::box: bad corners");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("Window::box: empty box");
  }
  return Window(Box{std::move(lo), std::move(hi)});
}

Window Window::ball(Point center, double radius) {
  if (center.empty()) throw std::invalid_argument("Window::ball: empty center");
  if (!(radius > 0.0)) throw std::invalid_argument("Window::ball: radius must be > 0");
  return Window(Ball{std::move(center), radius});
}

int Window::dimension() const {
  if (const auto* b = std::get_if<Box>(&v_)) return static_cast<int>(b->lo.size());
  return static_cast<int>(std::get<Ball>(v_).center.size());
}

double Window::volume() const {
  if (const auto* b = std::get_if<Box>(&v_)) {
    double v = 1.0;
    for (std::size_t i = 0; i < b->lo.size(); ++i) v *= b->hi[i] - b->lo[i];
    return v;
  }
  const Ball& b = std::get<Ball>(v_);
  return ball_volume(static_cast<int>(b.center.size()), b.radius);
}

bool Window::contains(std::span<const double> p) const {
  if (const auto* b = std::get_if<Box>(&v_)) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < b->lo[i] || p[i] > b->hi[i]) return false;
    }
    return true;
  }
  const Ball& b = std::get<Ball>(v_);
  return dist_sq(p, b.center) <= b.radius * b.radius;
}

bool Window::contains_window(const Window& inner) const {
  if (const auto* ob = std::get_if<Box>(&v_)) {
    if (const auto* ib = std::get_if<Box>(&inner.v_)) {
      for (std::size_t i = 0; i < ob->lo.size(); ++i) {
        if (ib->lo[i] < ob->lo[i] - 1e-12 || ib->hi[i] > ob->hi[i] + 1e-12) return false;
      }
      return true;
    }
    const Ball& b = std::get<Ball>(inner.v_);
    for (std::size_t i = 0; i < ob->lo.size(); ++i) {
      if (b.center[i] - b.radius < ob->lo[i] - 1e-12 ||
          b.center[i] + b.radius > ob->hi[i] + 1e-12) {
        return false;
      }
    }
    return true;
  }
  const Ball& outer = std::get<Ball>(v_);
  if (const auto* ib = std::get_if<Box>(&inner.v_)) {
    // Each box corner must lie inside the outer ball; farthest corner test.
    double far_sq = 0.0;
    for (std::size_t i = 0; i < ib->lo.size(); ++i) {
      const double a = std::fabs(ib->lo[i] - outer.center[i]);
      const double b = std::fabs(ib->hi[i] - outer.center[i]);
      const double m = std::max(a, b);
      far_sq += m * m;
    }
    return std::sqrt(far_sq) <= outer.radius + 1e-12;
  }
  const Ball& ib = std::get<Ball>(inner.v_);
  return dist(ib.center, outer.center) + ib.radius <= outer.radius + 1e-12;
}

Point Window::sample_uniform(RngStream& rng) const {
  if (const auto* b = std::get_if<Box>(&v_)) {
    Point p(b->lo.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform(b->lo[i], b->hi[i]);
    return p;
  }
  const Ball& b = std::get<Ball>(v_);
  const int d = static_cast<int>(b.center.size());
  Point p = sample_uniform_ball(d, rng);
  for (int i = 0; i < d; ++i) p[i] = b.center[i] + b.radius * p[i];
  return p;
}

PointCloud sample_iid(const Density& density, long n, RngStream& rng) {
  if (n < 0) throw std::invalid_argument("sample_iid: n must be >= 0");
  PointCloud cloud;
  cloud.dim = density.dimension();
  cloud.data.reserve(static_cast<std::size_t>(n) * cloud.dim);
  for (long i = 0; i < n; ++i) {
    const Point p = density.sample(rng);
    cloud.push(p);
  }
  return cloud;
}

PointCloud sample_poisson(double intensity, const Window& window, RngStream& rng) {
  if (!(intensity > 0.0)) throw std::invalid_argument("sample_poisson: intensity must be > 0");
  const long n = rng.poisson(intensity * window.volume());
  PointCloud cloud;
  cloud.dim = window.dimension();
  cloud.data.reserve(static_cast<std::size_t>(n) * cloud.dim);
  for (long i = 0; i < n; ++i) {
    const Point p = window.sample_uniform(rng);
    cloud.push(p);
  }
  return cloud;
}

PointCloud extend_poisson(const PointCloud& existing, double intensity, const Window& inner,
                          const Window& outer, RngStream& rng) {
  if (!(intensity > 0.0)) throw std::invalid_argument("extend_poisson: intensity must be > 0");
  if (!outer.contains_window(inner)) {
    throw std::invalid_argument("extend_poisson: windows not nested");
  }
  PointCloud cloud = existing;
  const double annulus_vol = outer.volume() - inner.volume();
  if (annulus_vol <= 0.0) return cloud;
  const long extra = rng.poisson(intensity * annulus_vol);
  for (long i = 0; i < extra; ++i) {
    Point p;
    do {
      p = outer.sample_uniform(rng);
    } while (inner.contains(p));
    cloud.push(p);
  }
  return cloud;
}

long count_in_ball(const PointCloud& cloud, const Ball& ball) {
  if (cloud.size() > 0 && cloud.dim != static_cast<int>(ball.center.size())) {
    throw std::invalid_argument("count_in_ball: dimension mismatch");
  }
  const double r2 = ball.radius * ball.radius;
  long n = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (dist_sq(cloud.at(i), ball.center) < r2) ++n;
  }
  return n;
}

double chernoff_bound(long n, double p, double t) {
  if (n < 1) throw std::invalid_argument("chernoff_bound: n must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chernoff_bound: p must be in (0,1)");
  if (!(t > 0.0)) throw std::invalid_argument("chernoff_bound: t must be > 0");
  const double np = static_cast<double>(n) * p;
  const double phi = t - np - t * std::log(t / np);
  return std::exp(phi);
}

}  // namespace vorsim
