#pragma once

#include <string>
#include <vector>

#include "vorsim/geom.hpp"
#include "vorsim/rng.hpp"
#include "vorsim/stats.hpp"

namespace vorsim {

// How union-of-balls volumes are computed inside the D_k sampler: exact
// branches (interval sweep in d = 1, the two-ball lens formula for k = 1 in
// d = 2) when available, hit-or-miss Monte Carlo otherwise. `force_mc`
// switches the exact branches off for cross-checks.
struct VolumePolicy {
  bool force_mc = false;
  long mc_samples = 100000;
};

struct DkSample {
  int k = 1;
  int d = 1;
  int w = 0;                 // Bernoulli(k/(k+1)) outcome; P(w=1) = k/(k+1)
  std::vector<Point> u;      // the k uniform-in-ball points
  double value = 0.0;        // D_k
  std::string method;        // "interval-1d" | "exact-2ball" | "mc(N)"
};

// The ball list of the D_k definition for a given branch and U's: for w = 0
// the balls B_{U_i, ||1-U_i||} plus B_{0,1}; for w = 1 the ball at 1 with
// radius ||1-U_1||, the balls B_{U_i, ||U_1-U_i||} for i >= 2, plus
// B_{0, ||U_1||}.
std::vector<Ball> dk_ball_list(int k, int d, int w, const std::vector<Point>& u);

// Union volume of a ball list under the policy, with the method tag used.
double dk_union_volume(const std::vector<Ball>& balls, int d, const VolumePolicy& policy,
                       RngStream& rng, std::string* method_out = nullptr);

DkSample sample_dk(int k, int d, RngStream& rng, const VolumePolicy& policy = {});

struct MomentEstimate {
  int k = 1;
  int d = 1;
  double estimate = 0.0;
  double se = 0.0;
  long n_outer = 0;
  std::string method;
};

// Monte Carlo estimate of E[(k+1)!/D_k^{k+1}], the limiting k-th moment of
// n mu_f(L_n(x)). Draw i uses the stream (seed, i, dk_draw), so the result is
// independent of the thread count.
MomentEstimate limiting_moment(int k, int d, long n_outer, std::uint64_t seed,
                               const VolumePolicy& policy = {}, int threads = 1);

// Sorted D_k draws for diagnostics and export.
std::vector<DkSample> sample_limit_law(int k, int d, long n_samples, std::uint64_t seed,
                                       const VolumePolicy& policy = {}, int threads = 1);

double factorial(int n);

}  // namespace vorsim
