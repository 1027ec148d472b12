#include "vorsim/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vorsim/numerics.hpp"
#include "vorsim/parallel.hpp"

namespace vorsim {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<Ball> dk_ball_list(int k, int d, int w, const std::vector<Point>& u) {
  if (static_cast<int>(u.size()) != k) throw std::invalid_argument("dk_ball_list: need k U's");
  Point one(d, 0.0);
  one[0] = 1.0;
  Point zero(d, 0.0);
  std::vector<Ball> balls;
  balls.reserve(static_cast<std::size_t>(k) + 1);
  if (w == 0) {
    for (int i = 0; i < k; ++i) balls.push_back({u[i], dist(one, u[i])});
    balls.push_back({zero, 1.0});
  } else {
    balls.push_back({one, dist(one, u[0])});
    for (int i = 1; i < k; ++i) balls.push_back({u[i], dist(u[0], u[i])});
    balls.push_back({zero, norm(u[0])});
  }
  return balls;
}

double dk_union_volume(const std::vector<Ball>& balls, int d, const VolumePolicy& policy,
                       RngStream& rng, std::string* method_out) {
  if (!policy.force_mc) {
    if (d == 1) {
      if (method_out) *method_out = "interval-1d";
      return ball_union_length_1d(balls);
    }
    if (d == 2 && balls.size() == 2) {
      if (method_out) *method_out = "exact-2ball";
      return two_ball_union_volume_exact(balls[0], balls[1], 2);
    }
  }
  if (method_out) *method_out = "mc(" + std::to_string(policy.mc_samples) + ")";
  const double raw = union_volume_mc(balls, policy.mc_samples, rng).estimate;
  // The union contains every member ball and is covered by their sum; project
  // the noisy estimate onto these certain bounds so the D_k range invariants
  // hold for the MC method too.
  double lo = 0.0, hi = 0.0;
  for (const Ball& b : balls) {
    const double v = ball_volume(d, b.radius);
    lo = std::max(lo, v);
    hi += v;
  }
  return std::clamp(raw, lo, hi);
}

DkSample sample_dk(int k, int d, RngStream& rng, const VolumePolicy& policy) {
  if (k < 1 || d < 1) throw std::invalid_argument("sample_dk: k and d must be >= 1");
  DkSample s;
  s.k = k;
  s.d = d;
  // W ~ Bernoulli(k/(k+1)), independent of the U's.
  s.w = rng.u01() < static_cast<double>(k) / static_cast<double>(k + 1) ? 1 : 0;
  s.u.reserve(k);
  for (int i = 0; i < k; ++i) s.u.push_back(sample_uniform_ball(d, rng));
  const std::vector<Ball> balls = dk_ball_list(k, d, s.w, s.u);
  const double vol = dk_union_volume(balls, d, policy, rng, &s.method);
  s.value = vol / unit_ball_volume(d);
  return s;
}

MomentEstimate limiting_moment(int k, int d, long n_outer, std::uint64_t seed,
                               const VolumePolicy& policy, int threads) {
  if (n_outer < 100) throw std::invalid_argument("limiting_moment: n_outer must be >= 100");
  std::vector<double> values(static_cast<std::size_t>(n_outer));
  std::string method;
  {
    RngStream probe(seed, 0, StreamPurpose::dk_draw);
    DkSample s = sample_dk(k, d, probe, policy);
    method = s.method;
  }
  const double kfac = factorial(k + 1);
  parallel_for_index(n_outer, threads, [&](long i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i), StreamPurpose::dk_draw);
    const DkSample s = sample_dk(k, d, rng, policy);
    values[static_cast<std::size_t>(i)] = kfac / std::pow(s.value, k + 1);
  });
  const MeanSe m = mean_and_se(values);
  MomentEstimate est;
  est.k = k;
  est.d = d;
  est.estimate = m.mean;
  est.se = m.se;
  est.n_outer = n_outer;
  est.method = method;
  return est;
}

std::vector<DkSample> sample_limit_law(int k, int d, long n_samples, std::uint64_t seed,
                                       const VolumePolicy& policy, int threads) {
  if (n_samples < 1) throw std::invalid_argument("sample_limit_law: n_samples must be >= 1");
  std::vector<DkSample> samples(static_cast<std::size_t>(n_samples));
  parallel_for_index(n_samples, threads, [&](long i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i), StreamPurpose::dk_draw);
    samples[static_cast<std::size_t>(i)] = sample_dk(k, d, rng, policy);
  });
  std::sort(samples.begin(), samples.end(),
            [](const DkSample& a, const DkSample& b) { return a.value < b.value; });
  return samples;
}

}  // namespace vorsim
