#include "vorsim/geom.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace vorsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

double dist_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double dist(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(dist_sq(a, b));
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
  return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

Point sample_uniform_ball(int d, RngStream& rng) {
  Point p(d);
  double n = 0.0;
  do {
    for (int i = 0; i < d; ++i) p[i] = rng.normal();
    n = norm(p);
  } while (n == 0.0);
  const double scale = std::pow(rng.u01(), 1.0 / d) / n;
  for (int i = 0; i < d; ++i) p[i] *= scale;
  return p;
}

double disk_lens_area(double r1, double r2, double center_dist) {
  if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
  const double d = center_dist;
  if (d >= r1 + r2) return 0.0;
  if (d <= std::fabs(r1 - r2)) {
    const double rm = std::min(r1, r2);
    return kPi * rm * rm;
  }
  auto clamped_acos = [](double v) { return std::acos(std::clamp(v, -1.0, 1.0)); };
  const double a1 = clamped_acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1));
  const double a2 = clamped_acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2));
  const double t = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(t, 0.0));
}

double two_ball_union_volume_exact(const Ball& b1, const Ball& b2, int d) {
  if (d != 1 && d != 2) {
    throw std::invalid_argument("two_ball_union_volume_exact: only d in {1,2}");
  }
  if (d == 1) {
    const Ball balls[2] = {b1, b2};
    return ball_union_length_1d(balls);
  }
  const double v1 = ball_volume(2, b1.radius);
  const double v2 = ball_volume(2, b2.radius);
  const double cd = dist(b1.center, b2.center);
  return v1 + v2 - disk_lens_area(b1.radius, b2.radius, cd);
}

double ball_union_length_1d(std::span<const Ball> balls) {
  std::vector<std::pair<double, double>> iv;
  iv.reserve(balls.size());
  for (const Ball& b : balls) {
    if (b.radius > 0.0) iv.emplace_back(b.center[0] - b.radius, b.center[0] + b.radius);
  }
  if (iv.empty()) return 0.0;
  std::sort(iv.begin(), iv.end());
  double total = 0.0;
  double lo = iv[0].first, hi = iv[0].second;
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].first > hi) {
      total += hi - lo;
      lo = iv[i].first;
      hi = iv[i].second;
    } else {
      hi = std::max(hi, iv[i].second);
    }
  }
  return total + (hi - lo);
}

McEstimate union_volume_mc(std::span<const Ball> balls, long n_samples, RngStream& rng) {
  if (n_samples < 1) throw std::invalid_argument("union_volume_mc: n_samples must be >= 1");
  std::vector<const Ball*> live;
  for (const Ball& b : balls) {
    if (b.radius > 0.0) live.push_back(&b);
  }
  if (live.empty()) return {0.0, 0.0};
  const int d = static_cast<int>(live[0]->center.size());
  Point lo(d, 0.0), hi(d, 0.0);
  for (int i = 0; i < d; ++i) {
    lo[i] = live[0]->center[i] - live[0]->radius;
    hi[i] = live[0]->center[i] + live[0]->radius;
  }
  for (const Ball* b : live) {
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], b->center[i] - b->radius);
      hi[i] = std::max(hi[i], b->center[i] + b->radius);
    }
  }
  double box_vol = 1.0;
  for (int i = 0; i < d; ++i) box_vol *= hi[i] - lo[i];

  Point q(d, 0.0);
  long hits = 0;
  for (long s = 0; s < n_samples; ++s) {
    for (int i = 0; i < d; ++i) q[i] = rng.uniform(lo[i], hi[i]);
    for (const Ball* b : live) {
      if (dist_sq(q, b->center) < b->radius * b->radius) {
        ++hits;
        break;
      }
    }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  return {box_vol * p, box_vol * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples))};
}

namespace {

// Positive root of the chord y = h against a circle at the origin.
double chord_section(double h, double r) { return h < r ? std::sqrt(r * r - h * h) : 0.0; }

// Indefinite integral of sqrt(r^2 - x^2) - h.
double chord_integral(double x, double h, double r) {
  return 0.5 * (std::sqrt(std::max(1.0 - x * x / (r * r), 0.0)) * x * r +
                r * r * std::asin(std::clamp(x / r, -1.0, 1.0)) - 2.0 * h * x);
}

// Area of circle ∩ {x0 <= x <= x1, y >= h}, circle at origin.
double strip_area(double x0, double x1, double h, double r) {
  if (x0 > x1) std::swap(x0, x1);
  const double s = chord_section(h, r);
  const double a = std::clamp(x1, -s, s);
  const double b = std::clamp(x0, -s, s);
  return chord_integral(a, h, r) - chord_integral(b, h, r);
}

double rect_area_origin(double x0, double x1, double y0, double y1, double r) {
  if (y0 > y1) std::swap(y0, y1);
  if (y0 < 0.0) {
    if (y1 < 0.0) return rect_area_origin(x0, x1, -y1, -y0, r);
    return strip_area(x0, x1, 0.0, r) - strip_area(x0, x1, -y0, r) +
           strip_area(x0, x1, 0.0, r) - strip_area(x0, x1, y1, r);
  }
  return strip_area(x0, x1, y0, r) - strip_area(x0, x1, y1, r);
}

}  // namespace

double disk_rect_intersection_area(double cx, double cy, double r, double xlo,
                                   double ylo, double xhi, double yhi) {
  if (r <= 0.0) return 0.0;
  return rect_area_origin(xlo - cx, xhi - cx, ylo - cy, yhi - cy, r);
}

double ball_box_overlap_volume(const Ball& ball, std::span<const double> lo,
                               std::span<const double> hi) {
  const int d = static_cast<int>(ball.center.size());
  if (ball.radius <= 0.0) return 0.0;
  if (d == 1) {
    const double a = std::max(lo[0], ball.center[0] - ball.radius);
    const double b = std::min(hi[0], ball.center[0] + ball.radius);
    return std::max(0.0, b - a);
  }
  if (d == 2) {
    return disk_rect_intersection_area(ball.center[0], ball.center[1], ball.radius,
                                       lo[0], lo[1], hi[0], hi[1]);
  }
  // d >= 3: quick accept/reject, then a deterministic hit-or-miss fallback
  // seeded from the geometry so equal inputs give equal outputs.
  double nearest_sq = 0.0;
  bool ball_in_box = true;
  for (int i = 0; i < d; ++i) {
    const double c = ball.center[i];
    const double n = std::clamp(c, lo[i], hi[i]) - c;
    nearest_sq += n * n;
    if (c - ball.radius < lo[i] || c + ball.radius > hi[i]) ball_in_box = false;
  }
  if (nearest_sq >= ball.radius * ball.radius) return 0.0;
  if (ball_in_box) return ball_volume(d, ball.radius);
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  auto fold = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h = mix_bits(h ^ bits);
  };
  for (int i = 0; i < d; ++i) {
    fold(ball.center[i]);
    fold(lo[i]);
    fold(hi[i]);
  }
  fold(ball.radius);
  RngStream rng(h);
  Point q(d, 0.0);
  const long n_samples = 200000;
  long hits = 0;
  Point blo(d), bhi(d);
  double box_vol = 1.0;
  for (int i = 0; i < d; ++i) {
    blo[i] = std::max(lo[i], ball.center[i] - ball.radius);
    bhi[i] = std::min(hi[i], ball.center[i] + ball.radius);
    box_vol *= bhi[i] - blo[i];
  }
  for (long s = 0; s < n_samples; ++s) {
    for (int i = 0; i < d; ++i) q[i] = rng.uniform(blo[i], bhi[i]);
    if (dist_sq(q, ball.center) < ball.radius * ball.radius) ++hits;
  }
  return box_vol * static_cast<double>(hits) / static_cast<double>(n_samples);
}

ConeSpec::ConeSpec(Point apex_, Point axis_, double alpha_)
    : apex(std::move(apex_)), axis(std::move(axis_)), alpha(alpha_) {
  if (!(alpha > 0.0)) throw std::invalid_argument("ConeSpec: alpha must be > 0");
  if (apex.size() != axis.size()) throw std::invalid_argument("ConeSpec: dimension mismatch");
  if (std::fabs(norm(axis) - 1.0) > 1e-12) {
    throw std::invalid_argument("ConeSpec: axis must be a unit vector");
  }
}

double ConeSpec::r2() const {
  return alpha * (1.0 + 31.0 * std::cos(kPi / 6.0)) / (64.0 * std::cos(kPi / 12.0));
}

bool ConeSpec::contains(std::span<const double> w) const {
  double dot = 0.0;
  double n2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double rel = w[i] - apex[i];
    dot += axis[i] * rel;
    n2 += rel * rel;
  }
  if (n2 == 0.0) return false;  // the apex itself is excluded
  return dot / std::sqrt(n2) >= std::cos(kPi / 24.0);
}

ConeLemmaResult cone_lemma_predicate(const ConeSpec& spec, const Point& p,
                                     const Point& y, const Point& z) {
  ConeLemmaResult res;
  res.conclusion_holds = dist(z, p) < dist(z, y);
  const double dy = dist(y, spec.apex);
  const double dp = dist(p, spec.apex);
  const double dz = dist(z, spec.apex);
  res.hypotheses_hold = spec.contains(p) && spec.contains(y) && spec.contains(z) &&
                        dy > 0.0 && dy < spec.r1() && dp >= spec.r2() && dp < spec.r3() &&
                        dz >= 0.5 * spec.alpha;
  return res;
}

}  // namespace vorsim
