#pragma once

#include <span>
#include <vector>

#include "vorsim/rng.hpp"

namespace vorsim {

// A point in R^d; the coordinate count is the dimension, fixed per
// computation.
using Point = std::vector<double>;

// Open ball B_{center, radius}. Zero radius denotes the empty ball.
struct Ball {
  Point center;
  double radius = 0.0;
};

double dist_sq(std::span<const double> a, std::span<const double> b);
double dist(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

// Volume of the d-dimensional unit ball, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);

inline double ball_volume(int d, double radius) {
  return radius > 0.0 ? unit_ball_volume(d) * std::pow(radius, d) : 0.0;
}

// Uniform draw from the unit ball: normalized Gaussian direction scaled by
// V^{1/d}, V uniform on [0,1]. No rejection, any dimension.
Point sample_uniform_ball(int d, RngStream& rng);

// Area of the intersection of two disks at center distance `center_dist`.
double disk_lens_area(double r1, double r2, double center_dist);

// Exact union measure of two balls; d = 1 by interval arithmetic, d = 2 via
// the lens formula. Other dimensions are rejected.
double two_ball_union_volume_exact(const Ball& b1, const Ball& b2, int d);

// Total length of a union of 1-d intervals given as balls (sort and merge).
double ball_union_length_1d(std::span<const Ball> balls);

struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
};

// Hit-or-miss estimate of the volume of a union of balls. The proposal region
// is the tightest axis-aligned bounding box of the union; estimate is box
// volume times hit fraction, se = box volume * sqrt(p(1-p)/n).
McEstimate union_volume_mc(std::span<const Ball> balls, long n_samples, RngStream& rng);

// Volume of ball ∩ box, exact for d <= 2 (interval / disk-rectangle
// decomposition); higher dimensions fall back to a deterministic hit-or-miss
// estimate seeded from the geometry.
double ball_box_overlap_volume(const Ball& ball, std::span<const double> lo,
                               std::span<const double> hi);

// Area of disk(cx, cy, r) ∩ [xlo,xhi] x [ylo,yhi], exact to double precision
// by the corner-area decomposition.
double disk_rect_intersection_area(double cx, double cy, double r, double xlo,
                                   double ylo, double xhi, double yhi);

// Cone of angle pi/12 with apex and unit axis, plus the three radii of the
// cone lemma. Membership uses the half-angle test against cos(pi/24).
struct ConeSpec {
  Point apex;
  Point axis;   // unit vector, checked at construction
  double alpha; // > 0

  ConeSpec(Point apex_, Point axis_, double alpha_);

  double r1() const { return alpha / 64.0; }
  double r2() const;
  double r3() const { return alpha * 30.0 / 64.0; }

  bool contains(std::span<const double> w) const;
};

struct ConeLemmaResult {
  bool hypotheses_hold = false;
  bool conclusion_holds = false;
};

// Checks the cone-lemma hypotheses (p, y, z in the cone, the three radial
// constraints) and its conclusion ||z-p|| < ||z-y||. Points outside the cone
// simply fail the hypotheses.
ConeLemmaResult cone_lemma_predicate(const ConeSpec& spec, const Point& p,
                                     const Point& y, const Point& z);

}  // namespace vorsim
