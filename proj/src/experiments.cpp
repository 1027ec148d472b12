#include "vorsim/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vorsim/limit_law.hpp"
#include "vorsim/numerics.hpp"
#include "vorsim/parallel.hpp"

namespace vorsim {

const char* const kArtifactVersion = "0.1.0";

namespace {

// Acceptance-grade thresholds, pinned here.
constexpr double kEdgeMeanLo = 5.85;
constexpr double kEdgeMeanHi = 6.15;
constexpr double kKsCouplingMax = 0.06;
constexpr double kKsMonotoneSlack = 0.02;
constexpr double kMomentRelTol = 0.05;
constexpr double kDiameterCorrMax = -0.95;
constexpr double kLebesgueKsMax = 0.08;
constexpr double kIndependenceSupMax = 0.05;
constexpr double kPermutationPvalMin = 0.005;
constexpr double kMaxExclusionRate = 0.01;
constexpr long kMinTailCount = 20;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

ExperimentReport base_report(const RunConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = cfg.experiment;
  rep.seed = cfg.seed;
  rep.config = config_echo(cfg);
  rep.config_hash = config_hash_hex(rep.config);
  rep.version = kArtifactVersion;
  rep.tables = nlohmann::json::object();
  return rep;
}

void add_stat(ExperimentReport& rep, const std::string& name, double value, double se = 0.0,
              const std::string& method = "exact") {
  rep.stats.push_back({name, value, se, method});
}

bool add_check(ExperimentReport& rep, const std::string& name, double value,
               const std::string& relation, double bound) {
  bool pass = false;
  if (relation == "<=") {
    pass = value <= bound;
  } else if (relation == ">=") {
    pass = value >= bound;
  } else if (relation == "<") {
    pass = value < bound;
  } else if (relation == "==") {
    pass = value == bound;
  } else {
    throw std::logic_error("add_check: bad relation " + relation);
  }
  rep.checks.push_back({name, value, bound, relation, pass});
  return pass;
}

void add_exclusion_check(ExperimentReport& rep, const std::string& name, long excluded,
                         long total) {
  const double rate = total > 0 ? static_cast<double>(excluded) / static_cast<double>(total) : 0.0;
  add_check(rep, name, rate, "<=", kMaxExclusionRate);
}

double fx_at(const Density& density, const Point& probe) {
  const double fx = density.eval(probe);
  if (!(fx > 0.0) || !std::isfinite(fx)) {
    throw std::invalid_argument("probe must have positive finite density");
  }
  return fx;
}

// ---------------------------------------------------------------------------
// figure31

ExperimentResult figure31_impl(const RunConfig& cfg) {
  if (cfg.d != 2) throw std::invalid_argument("figure31: d = 2 only");
  const Density density = make_density(cfg);
  const Point probe = cfg.probes.at(0);
  fx_at(density, probe);

  struct Row {
    double l = 0.0, a = 0.0;
    bool excluded = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(cfg.trials));
  const double n_d = static_cast<double>(cfg.n);
  parallel_for_index(cfg.trials, cfg.threads, [&](long t) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(t), StreamPurpose::cloud);
    const PointCloud cloud = sample_iid(density, cfg.n, rng);
    const CellQuery ql{CellMode::containing, probe, &cloud, 0.0};
    const CellQuery qa{CellMode::fixed_nucleus, probe, &cloud, 0.0};
    const CellReport rl = resolve_cell(ql, density, rng);
    const CellReport ra = resolve_cell(qa, density, rng);
    Row& row = rows[static_cast<std::size_t>(t)];
    row.l = n_d * rl.mu.value;
    row.a = n_d * ra.mu.value;
    row.excluded = rl.truncated || ra.truncated;
  });

  ExperimentResult res;
  res.report = base_report(cfg);
  Histogram hist_l{cfg.bin_width, 0.0, {}, 0};
  Histogram hist_a{cfg.bin_width, 0.0, {}, 0};
  std::vector<double> ls, as;
  res.trial_table.columns = {"trial", "n_mu_L", "n_mu_A", "excluded"};
  for (long t = 0; t < cfg.trials; ++t) {
    const Row& row = rows[static_cast<std::size_t>(t)];
    res.trial_table.rows.push_back(
        {static_cast<double>(t), row.l, row.a, row.excluded ? 1.0 : 0.0});
    if (row.excluded) {
      ++res.report.excluded;
      continue;
    }
    ++res.report.included;
    hist_l.add(row.l);
    hist_a.add(row.a);
    ls.push_back(row.l);
    as.push_back(row.a);
  }
  if (hist_l.n_total + res.report.excluded != cfg.trials) {
    throw std::logic_error("figure31: histogram conservation violated");
  }

  const MeanSe ml = mean_and_se(ls);
  const MeanSe ma = mean_and_se(as);
  add_stat(res.report, "mean_n_mu_L", ml.mean, ml.se);
  add_stat(res.report, "mean_n_mu_A", ma.mean, ma.se);
  const double sep = std::sqrt(ml.se * ml.se + ma.se * ma.se);
  add_check(res.report, "mean_L_exceeds_mean_A_by_3se", ml.mean - ma.mean, ">=", 3.0 * sep);
  add_exclusion_check(res.report, "exclusion_rate", res.report.excluded, cfg.trials);

  res.histograms = {std::move(hist_l), std::move(hist_a)};
  res.histogram_names = {"hist_L", "hist_A"};
  return res;
}

// ---------------------------------------------------------------------------
// edges

ExperimentResult edges_impl(const RunConfig& cfg) {
  if (cfg.d != 2) throw std::invalid_argument("edges: d = 2 only");
  const Density density = make_density(cfg);
  const Point probe = cfg.probes.at(0);
  const double fx = fx_at(density, probe);

  std::vector<long> ladder = cfg.n_ladder;
  if (std::find(ladder.begin(), ladder.end(), cfg.n) == ladder.end()) ladder.push_back(cfg.n);

  ExperimentResult res;
  res.report = base_report(cfg);
  res.trial_table.columns = {"n", "trial", "edges_a", "excluded_a", "edges_p", "excluded_p"};
  nlohmann::json per_n = nlohmann::json::array();

  struct Row {
    int edges_a = -1, edges_p = -1;
    bool exc_a = false, exc_p = false;
  };

  double primary_mean_a = 0.0, primary_mean_p = 0.0;
  double first_m2_a = 0.0, first_m2_a_se = 0.0, first_m2_p = 0.0, first_m2_p_se = 0.0;
  double last_m2_a = 0.0, last_m2_a_se = 0.0, last_m2_p = 0.0, last_m2_p_se = 0.0;
  long total_excluded_a = 0, total_excluded_p = 0;
  long primary_included_a = 0;

  for (std::size_t li = 0; li < ladder.size(); ++li) {
    const long n = ladder[li];
    const double intensity = static_cast<double>(n) * fx;
    std::vector<Row> rows(static_cast<std::size_t>(cfg.trials));
    parallel_for_index(cfg.trials, cfg.threads, [&](long t) {
      const std::uint64_t idx = static_cast<std::uint64_t>(li) * cfg.trials + t;
      Row& row = rows[static_cast<std::size_t>(t)];
      {
        RngStream rng(cfg.seed, idx, StreamPurpose::cloud);
        const PointCloud cloud = sample_iid(density, n, rng);
        const CellQuery q{CellMode::fixed_nucleus, probe, &cloud, 0.0};
        const CellReport rep = resolve_cell(q, density, rng);
        row.edges_a = rep.edge_count;
        row.exc_a = rep.truncated;
      }
      {
        RngStream rng(cfg.seed, idx, StreamPurpose::poisson_cloud);
        const CellQuery q{CellMode::poisson_typical, probe, nullptr, intensity};
        const CellReport rep = resolve_cell(q, density, rng);
        row.edges_p = rep.edge_count;
        row.exc_p = rep.truncated;
      }
    });

    std::vector<double> ea, ep, ea2, ep2;
    long exc_a = 0, exc_p = 0;
    for (long t = 0; t < cfg.trials; ++t) {
      const Row& row = rows[static_cast<std::size_t>(t)];
      res.trial_table.rows.push_back({static_cast<double>(n), static_cast<double>(t),
                                      static_cast<double>(row.edges_a), row.exc_a ? 1.0 : 0.0,
                                      static_cast<double>(row.edges_p), row.exc_p ? 1.0 : 0.0});
      if (row.exc_a) {
        ++exc_a;
      } else {
        ea.push_back(row.edges_a);
        ea2.push_back(static_cast<double>(row.edges_a) * row.edges_a);
      }
      if (row.exc_p) {
        ++exc_p;
      } else {
        ep.push_back(row.edges_p);
        ep2.push_back(static_cast<double>(row.edges_p) * row.edges_p);
      }
    }
    total_excluded_a += exc_a;
    total_excluded_p += exc_p;

    const MeanSe ma = mean_and_se(ea);
    const MeanSe mp = mean_and_se(ep);
    const MeanSe ma2 = mean_and_se(ea2);
    const MeanSe mp2 = mean_and_se(ep2);
    nlohmann::json row{{"n", n},
                       {"mean_edges_a", ma.mean},
                       {"se_a", ma.se},
                       {"mean_edges_p", mp.mean},
                       {"se_p", mp.se},
                       {"second_moment_a", ma2.mean},
                       {"second_moment_a_se", ma2.se},
                       {"second_moment_p", mp2.mean},
                       {"second_moment_p_se", mp2.se},
                       {"excluded_a", exc_a},
                       {"excluded_p", exc_p}};
    per_n.push_back(row);

    if (li == 0) {
      first_m2_a = ma2.mean;
      first_m2_a_se = ma2.se;
      first_m2_p = mp2.mean;
      first_m2_p_se = mp2.se;
    }
    last_m2_a = ma2.mean;
    last_m2_a_se = ma2.se;
    last_m2_p = mp2.mean;
    last_m2_p_se = mp2.se;
    if (n == cfg.n) {
      primary_mean_a = ma.mean;
      primary_mean_p = mp.mean;
      primary_included_a = static_cast<long>(ea.size());
      add_stat(res.report, "mean_edges_a_n" + std::to_string(n), ma.mean, ma.se);
      add_stat(res.report, "mean_edges_p_n" + std::to_string(n), mp.mean, mp.se);
    }
  }
  res.report.tables["per_n"] = per_n;
  res.report.included = primary_included_a;
  res.report.excluded = total_excluded_a + total_excluded_p;

  add_check(res.report, "mean_edges_a_lower", primary_mean_a, ">=", kEdgeMeanLo);
  add_check(res.report, "mean_edges_a_upper", primary_mean_a, "<=", kEdgeMeanHi);
  add_check(res.report, "mean_edges_p_lower", primary_mean_p, ">=", kEdgeMeanLo);
  add_check(res.report, "mean_edges_p_upper", primary_mean_p, "<=", kEdgeMeanHi);
  if (ladder.size() > 1) {
    add_check(res.report, "second_moment_a_stable", last_m2_a - first_m2_a, "<=",
              3.0 * std::sqrt(last_m2_a_se * last_m2_a_se + first_m2_a_se * first_m2_a_se));
    add_check(res.report, "second_moment_p_stable", last_m2_p - first_m2_p, "<=",
              3.0 * std::sqrt(last_m2_p_se * last_m2_p_se + first_m2_p_se * first_m2_p_se));
  }
  add_exclusion_check(res.report, "exclusion_rate_a", total_excluded_a,
                      static_cast<long>(ladder.size()) * cfg.trials);
  add_exclusion_check(res.report, "exclusion_rate_p", total_excluded_p,
                      static_cast<long>(ladder.size()) * cfg.trials);
  return res;
}

// ---------------------------------------------------------------------------
// ks coupling

ExperimentResult ks_impl(const RunConfig& cfg) {
  if (cfg.d != 2) throw std::invalid_argument("ks: d = 2 only");
  const Density density = make_density(cfg);
  const Point probe = cfg.probes.at(0);
  const double fx = fx_at(density, probe);
  const bool use_area = cfg.statistic == "area";

  ExperimentResult res;
  res.report = base_report(cfg);
  res.trial_table.columns = {"n", "trial", "g_a", "excluded_a", "g_p", "excluded_p"};
  nlohmann::json per_n = nlohmann::json::array();
  std::vector<double> ks_values;
  long total_excluded = 0;

  for (std::size_t li = 0; li < cfg.n_ladder.size(); ++li) {
    const long n = cfg.n_ladder[li];
    const double intensity = static_cast<double>(n) * fx;
    struct Row {
      double a = 0.0, p = 0.0;
      bool exc_a = false, exc_p = false;
    };
    std::vector<Row> rows(static_cast<std::size_t>(cfg.trials));
    parallel_for_index(cfg.trials, cfg.threads, [&](long t) {
      const std::uint64_t idx = static_cast<std::uint64_t>(li) * cfg.trials + t;
      Row& row = rows[static_cast<std::size_t>(t)];
      {
        RngStream rng(cfg.seed, idx, StreamPurpose::cloud);
        const PointCloud cloud = sample_iid(density, n, rng);
        const CellQuery q{CellMode::fixed_nucleus, probe, &cloud, 0.0};
        const CellReport rep = resolve_cell(q, density, rng);
        row.a = use_area ? rep.lebesgue.value : static_cast<double>(rep.edge_count);
        row.exc_a = rep.truncated;
      }
      {
        RngStream rng(cfg.seed, idx, StreamPurpose::poisson_cloud);
        const CellQuery q{CellMode::poisson_typical, probe, nullptr, intensity};
        const CellReport rep = resolve_cell(q, density, rng);
        row.p = use_area ? rep.lebesgue.value : static_cast<double>(rep.edge_count);
        row.exc_p = rep.truncated;
      }
    });
    std::vector<double> ga, gp;
    long exc = 0;
    for (long t = 0; t < cfg.trials; ++t) {
      const Row& row = rows[static_cast<std::size_t>(t)];
      res.trial_table.rows.push_back({static_cast<double>(n), static_cast<double>(t), row.a,
                                      row.exc_a ? 1.0 : 0.0, row.p, row.exc_p ? 1.0 : 0.0});
      if (row.exc_a) {
        ++exc;
      } else {
        ga.push_back(row.a);
      }
      if (row.exc_p) {
        ++exc;
      } else {
        gp.push_back(row.p);
      }
    }
    total_excluded += exc;
    const double ks = ks_two_sample(EmpiricalDistribution::from_samples(ga),
                                    EmpiricalDistribution::from_samples(gp));
    ks_values.push_back(ks);
    per_n.push_back({{"n", n},
                     {"ks", ks},
                     {"samples_a", ga.size()},
                     {"samples_p", gp.size()},
                     {"excluded", exc}});
    add_stat(res.report, "ks_n" + std::to_string(n), ks, 0.0, "ecdf");
  }
  res.report.tables["per_n"] = per_n;
  res.report.excluded = total_excluded;
  res.report.included = static_cast<long>(cfg.n_ladder.size()) * 2 * cfg.trials - total_excluded;

  add_check(res.report, "ks_final", ks_values.back(), "<=", kKsCouplingMax);
  for (std::size_t i = 0; i + 1 < ks_values.size(); ++i) {
    add_check(res.report, "ks_non_increasing_" + std::to_string(i),
              ks_values[i + 1] - ks_values[i], "<=", kKsMonotoneSlack);
  }
  add_exclusion_check(res.report, "exclusion_rate", total_excluded,
                      static_cast<long>(cfg.n_ladder.size()) * 2 * cfg.trials);
  return res;
}

// ---------------------------------------------------------------------------
// diameter tail

ExperimentResult diameter_impl(const RunConfig& cfg) {
  if (cfg.d != 1 && cfg.d != 2) throw std::invalid_argument("diameter-tail: d in {1,2} only");
  const Density density = make_density(cfg);
  const Point probe = cfg.probes.at(0);
  fx_at(density, probe);

  struct Row {
    double diameter = 0.0;
    bool excluded = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(cfg.trials));
  parallel_for_index(cfg.trials, cfg.threads, [&](long t) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(t), StreamPurpose::cloud);
    const PointCloud cloud = sample_iid(density, cfg.n, rng);
    const CellQuery q{CellMode::containing, probe, &cloud, 0.0};
    const CellReport rep = resolve_cell(q, density, rng);
    rows[static_cast<std::size_t>(t)] = {rep.diameter, rep.truncated};
  });

  ExperimentResult res;
  res.report = base_report(cfg);
  res.trial_table.columns = {"trial", "diameter", "excluded"};
  std::vector<double> diam;
  for (long t = 0; t < cfg.trials; ++t) {
    const Row& row = rows[static_cast<std::size_t>(t)];
    res.trial_table.rows.push_back(
        {static_cast<double>(t), row.diameter, row.excluded ? 1.0 : 0.0});
    if (row.excluded) {
      ++res.report.excluded;
    } else {
      diam.push_back(row.diameter);
    }
  }
  res.report.included = static_cast<long>(diam.size());
  const double m = static_cast<double>(diam.size());
  const double scale = std::pow(static_cast<double>(cfg.n), -1.0 / cfg.d);

  nlohmann::json tail_rows = nlohmann::json::array();
  std::vector<double> fit_x, fit_y;
  double prev_p = 1.0, prev_sigma = 0.0;
  bool monotone_ok = true;
  for (double t : cfg.t_grid) {
    const double threshold = t * scale;
    long count = 0;
    for (double dval : diam) {
      if (dval >= threshold) ++count;
    }
    const double p = static_cast<double>(count) / m;
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / m);
    const bool usable = count >= kMinTailCount;
    tail_rows.push_back(
        {{"t", t}, {"p_hat", p}, {"sigma", sigma}, {"count", count}, {"usable", usable}});
    if (usable) {
      fit_x.push_back(std::pow(t, cfg.d));
      fit_y.push_back(std::log(p));
    }
    if (p > prev_p + 2.0 * (sigma + prev_sigma)) monotone_ok = false;
    prev_p = p;
    prev_sigma = sigma;
  }
  res.report.tables["tail"] = tail_rows;

  add_check(res.report, "usable_points", static_cast<double>(fit_x.size()), ">=", 6.0);
  add_check(res.report, "tail_monotone", monotone_ok ? 1.0 : 0.0, "==", 1.0);
  if (fit_x.size() >= 2) {
    const LinearFit fit = linear_fit(fit_x, fit_y);
    add_stat(res.report, "slope_log_p_vs_t_d", fit.slope);
    add_stat(res.report, "correlation", fit.correlation);
    add_check(res.report, "slope_negative", fit.slope, "<", 0.0);
    add_check(res.report, "correlation_strongly_negative", fit.correlation, "<=",
              kDiameterCorrMax);
  } else {
    add_check(res.report, "slope_negative", 1.0, "<", 0.0);  // cannot fit: fail loudly
  }
  add_exclusion_check(res.report, "exclusion_rate", res.report.excluded, cfg.trials);
  return res;
}

// ---------------------------------------------------------------------------
// moment convergence

ExperimentResult moments_impl(const RunConfig& cfg) {
  if (cfg.d != 1 && cfg.d != 2) throw std::invalid_argument("moments: d in {1,2} only");
  if (cfg.k != 1 && cfg.k != 2) throw std::invalid_argument("moments: k in {1,2} only");
  const Density density = make_density(cfg);
  const Point probe = cfg.probes.at(0);
  fx_at(density, probe);

  VolumePolicy policy;
  policy.mc_samples = std::max<long>(cfg.mc_inner, 100000);
  const MomentEstimate target =
      limiting_moment(cfg.k, cfg.d, cfg.moment_outer, cfg.seed, policy, cfg.threads);

  ExperimentResult res;
  res.report = base_report(cfg);
  res.trial_table.columns = {"n", "trial", "n_mu_pow_k", "excluded"};
  add_stat(res.report, "limiting_moment_target", target.estimate, target.se, target.method);

  nlohmann::json per_n = nlohmann::json::array();
  std::vector<double> means, ses, gaps;
  long total_excluded = 0;
  for (std::size_t li = 0; li < cfg.n_ladder.size(); ++li) {
    const long n = cfg.n_ladder[li];
    std::vector<double> vals(static_cast<std::size_t>(cfg.trials));
    std::vector<char> excluded(static_cast<std::size_t>(cfg.trials), 0);
    parallel_for_index(cfg.trials, cfg.threads, [&](long t) {
      const std::uint64_t idx = static_cast<std::uint64_t>(li) * cfg.trials + t;
      RngStream rng(cfg.seed, idx, StreamPurpose::cloud);
      const PointCloud cloud = sample_iid(density, n, rng);
      const CellQuery q{CellMode::containing, probe, &cloud, 0.0};
      const CellReport rep = resolve_cell(q, density, rng);
      vals[static_cast<std::size_t>(t)] =
          std::pow(static_cast<double>(n) * rep.mu.value, cfg.k);
      excluded[static_cast<std::size_t>(t)] = rep.truncated ? 1 : 0;
    });
    std::vector<double> kept;
    long exc = 0;
    for (long t = 0; t < cfg.trials; ++t) {
      const bool ex = excluded[static_cast<std::size_t>(t)] != 0;
      res.trial_table.rows.push_back({static_cast<double>(n), static_cast<double>(t),
                                      vals[static_cast<std::size_t>(t)], ex ? 1.0 : 0.0});
      if (ex) {
        ++exc;
      } else {
        kept.push_back(vals[static_cast<std::size_t>(t)]);
      }
    }
    total_excluded += exc;
    const MeanSe ms = mean_and_se(kept);
    means.push_back(ms.mean);
    ses.push_back(ms.se);
    gaps.push_back(std::fabs(ms.mean - target.estimate));
    per_n.push_back({{"n", n},
                     {"empirical_moment", ms.mean},
                     {"se", ms.se},
                     {"gap", gaps.back()},
                     {"excluded", exc}});
    add_stat(res.report, "empirical_moment_n" + std::to_string(n), ms.mean, ms.se);
  }
  res.report.tables["per_n"] = per_n;
  res.report.excluded = total_excluded;
  res.report.included = static_cast<long>(cfg.n_ladder.size()) * cfg.trials - total_excluded;

  const std::size_t last = means.size() - 1;
  if (cfg.d == 1 && cfg.k == 1) {
    const double tol = std::max(kMomentRelTol * std::fabs(target.estimate),
                                3.0 * std::sqrt(ses[last] * ses[last] + target.se * target.se));
    add_check(res.report, "final_moment_close_to_target", gaps[last], "<=", tol);
  }
  if (means.size() > 1) {
    const double slack = 2.0 * std::sqrt(ses[last] * ses[last] + ses[0] * ses[0]);
    add_check(res.report, "gap_shrinks_along_ladder", gaps[last] - gaps[0], "<", slack);
  }
  for (double v : means) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      add_check(res.report, "moments_positive_finite", 0.0, "==", 1.0);
      break;
    }
  }
  add_exclusion_check(res.report, "exclusion_rate", total_excluded,
                      static_cast<long>(cfg.n_ladder.size()) * cfg.trials);
  return res;
}

// ---------------------------------------------------------------------------
// lebesgue convergence

ExperimentResult lebesgue_impl(const RunConfig& cfg) {
  if (cfg.d != 2) throw std::invalid_argument("lebesgue: d = 2 only");
  const Density density = make_density(cfg);
  const Point probe = cfg.probes.at(0);
  const double fx = fx_at(density, probe);

  ExperimentResult res;
  res.report = base_report(cfg);
  res.trial_table.columns = {"n", "trial", "n_f_lambda", "n_mu", "excluded"};
  nlohmann::json per_n = nlohmann::json::array();
  std::vector<double> ks_values;
  long total_excluded = 0;

  for (std::size_t li = 0; li < cfg.n_ladder.size(); ++li) {
    const long n = cfg.n_ladder[li];
    struct Row {
      double nfl = 0.0, nmu = 0.0;
      bool excluded = false;
    };
    std::vector<Row> rows(static_cast<std::size_t>(cfg.trials));
    parallel_for_index(cfg.trials, cfg.threads, [&](long t) {
      const std::uint64_t idx = static_cast<std::uint64_t>(li) * cfg.trials + t;
      RngStream rng(cfg.seed, idx, StreamPurpose::cloud);
      const PointCloud cloud = sample_iid(density, n, rng);
      const CellQuery q{CellMode::containing, probe, &cloud, 0.0};
      const CellReport rep = resolve_cell(q, density, rng);
      Row& row = rows[static_cast<std::size_t>(t)];
      row.nfl = static_cast<double>(n) * fx * rep.lebesgue.value;
      row.nmu = static_cast<double>(n) * rep.mu.value;
      row.excluded = rep.truncated;
    });
    std::vector<double> nfl, nmu;
    long exc = 0;
    for (long t = 0; t < cfg.trials; ++t) {
      const Row& row = rows[static_cast<std::size_t>(t)];
      res.trial_table.rows.push_back({static_cast<double>(n), static_cast<double>(t), row.nfl,
                                      row.nmu, row.excluded ? 1.0 : 0.0});
      if (row.excluded) {
        ++exc;
      } else {
        nfl.push_back(row.nfl);
        nmu.push_back(row.nmu);
      }
    }
    total_excluded += exc;
    const double ks = ks_two_sample(EmpiricalDistribution::from_samples(nfl),
                                    EmpiricalDistribution::from_samples(nmu));
    ks_values.push_back(ks);
    per_n.push_back({{"n", n}, {"ks", ks}, {"included", nfl.size()}, {"excluded", exc}});
    add_stat(res.report, "ks_n" + std::to_string(n), ks, 0.0, "ecdf");
  }
  res.report.tables["per_n"] = per_n;
  res.report.excluded = total_excluded;
  res.report.included = static_cast<long>(cfg.n_ladder.size()) * cfg.trials - total_excluded;

  if (density.is_uniform_box()) {
    for (std::size_t i = 0; i < ks_values.size(); ++i) {
      add_check(res.report, "ks_identity_n" + std::to_string(cfg.n_ladder[i]), ks_values[i],
                "==", 0.0);
    }
  } else {
    add_check(res.report, "ks_final", ks_values.back(), "<=", kLebesgueKsMax);
    if (ks_values.size() > 1) {
      add_check(res.report, "ks_non_increasing", ks_values.back() - ks_values.front(), "<=",
                0.0);
    }
  }
  add_exclusion_check(res.report, "exclusion_rate", total_excluded,
                      static_cast<long>(cfg.n_ladder.size()) * cfg.trials);
  return res;
}

// ---------------------------------------------------------------------------
// independence

double independence_sup(const std::vector<double>& v1, const std::vector<double>& v2,
                        const std::vector<double>& grid1, const std::vector<double>& grid2) {
  const double m = static_cast<double>(v1.size());
  double sup = 0.0;
  for (double z1 : grid1) {
    for (double z2 : grid2) {
      long joint = 0, c1 = 0, c2 = 0;
      for (std::size_t i = 0; i < v1.size(); ++i) {
        const bool a = v1[i] <= z1;
        const bool b = v2[i] <= z2;
        if (a) ++c1;
        if (b) ++c2;
        if (a && b) ++joint;
      }
      const double diff = std::fabs(static_cast<double>(joint) / m -
                                    (static_cast<double>(c1) / m) * (static_cast<double>(c2) / m));
      sup = std::max(sup, diff);
    }
  }
  return sup;
}

ExperimentResult independence_impl(const RunConfig& cfg) {
  if (cfg.d != 2) throw std::invalid_argument("independence: d = 2 only");
  const Density density = make_density(cfg);
  if (cfg.probes.size() != 2) throw std::invalid_argument("independence: need 2 probes");
  const Point x1 = cfg.probes[0];
  const Point x2 = cfg.probes[1];
  if (x1 == x2) throw std::invalid_argument("independence: coincident probes");
  fx_at(density, x1);
  fx_at(density, x2);

  struct Row {
    double v1 = 0.0, v2 = 0.0;
    bool excluded = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(cfg.trials));
  const double n_d = static_cast<double>(cfg.n);
  parallel_for_index(cfg.trials, cfg.threads, [&](long t) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(t), StreamPurpose::cloud);
    const PointCloud cloud = sample_iid(density, cfg.n, rng);
    const CellQuery q1{CellMode::containing, x1, &cloud, 0.0};
    const CellQuery q2{CellMode::containing, x2, &cloud, 0.0};
    const CellReport r1 = resolve_cell(q1, density, rng);
    const CellReport r2 = resolve_cell(q2, density, rng);
    Row& row = rows[static_cast<std::size_t>(t)];
    row.v1 = n_d * r1.mu.value;
    row.v2 = n_d * r2.mu.value;
    row.excluded = r1.truncated || r2.truncated;
  });

  ExperimentResult res;
  res.report = base_report(cfg);
  res.trial_table.columns = {"trial", "n_mu_x1", "n_mu_x2", "excluded"};
  std::vector<double> v1, v2;
  for (long t = 0; t < cfg.trials; ++t) {
    const Row& row = rows[static_cast<std::size_t>(t)];
    res.trial_table.rows.push_back(
        {static_cast<double>(t), row.v1, row.v2, row.excluded ? 1.0 : 0.0});
    if (row.excluded) {
      ++res.report.excluded;
    } else {
      v1.push_back(row.v1);
      v2.push_back(row.v2);
    }
  }
  res.report.included = static_cast<long>(v1.size());
  if (v1.size() < 20) throw std::invalid_argument("independence: too few included trials");

  const EmpiricalDistribution e1 = EmpiricalDistribution::from_samples(v1);
  const EmpiricalDistribution e2 = EmpiricalDistribution::from_samples(v2);
  std::vector<double> grid1, grid2;
  for (int i = 1; i <= 10; ++i) {
    grid1.push_back(e1.quantile(0.1 * i));
    grid2.push_back(e2.quantile(0.1 * i));
  }
  const double sup = independence_sup(v1, v2, grid1, grid2);
  const double corr = sample_correlation(v1, v2);
  add_stat(res.report, "sup_joint_minus_product", sup, 0.0, "ecdf");
  add_stat(res.report, "pair_correlation", corr);

  // Permutation null: break the pairing, keep the marginals.
  double pval = 1.0;
  if (cfg.permutations > 0) {
    long geq = 0;
    std::vector<double> null_sups(static_cast<std::size_t>(cfg.permutations));
    parallel_for_index(cfg.permutations, cfg.threads, [&](long b) {
      RngStream rng(cfg.seed, static_cast<std::uint64_t>(b), StreamPurpose::shuffle);
      std::vector<double> shuffled = v2;
      for (std::size_t i = shuffled.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(shuffled[i - 1], shuffled[j]);
      }
      null_sups[static_cast<std::size_t>(b)] = independence_sup(v1, shuffled, grid1, grid2);
    });
    for (double s : null_sups) {
      if (s >= sup) ++geq;
    }
    pval = static_cast<double>(1 + geq) / static_cast<double>(cfg.permutations + 1);
    const MeanSe nm = mean_and_se(null_sups);
    add_stat(res.report, "permutation_null_mean_sup", nm.mean, nm.se, "mc");
    add_stat(res.report, "permutation_p_value", pval, 0.0, "mc");
  }

  add_check(res.report, "sup_within_threshold", sup, "<=", kIndependenceSupMax);
  add_check(res.report, "correlation_within_3sigma", std::fabs(corr), "<=",
            3.0 / std::sqrt(static_cast<double>(v1.size())));
  if (cfg.permutations > 0) {
    add_check(res.report, "permutation_null_indistinguishable", pval, ">=",
              kPermutationPvalMin);
  }
  add_exclusion_check(res.report, "exclusion_rate", res.report.excluded, cfg.trials);
  return res;
}

// ---------------------------------------------------------------------------
// dk sample export

ExperimentResult dk_impl(const RunConfig& cfg) {
  VolumePolicy policy;
  policy.mc_samples = cfg.mc_inner;
  const std::vector<DkSample> samples =
      sample_limit_law(cfg.k, cfg.d, cfg.dk_samples, cfg.seed, policy, cfg.threads);

  ExperimentResult res;
  res.report = base_report(cfg);
  res.trial_table.columns = {"k", "d", "w", "value"};
  long w1 = 0;
  double vmin = samples.front().value, vmax = samples.back().value;
  std::vector<double> moment_terms(samples.size());
  const double kfac = factorial(cfg.k + 1);
  double w0_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const DkSample& s = samples[i];
    res.trial_table.rows.push_back({static_cast<double>(s.k), static_cast<double>(s.d),
                                    static_cast<double>(s.w), s.value});
    if (s.w == 1) {
      ++w1;
    } else {
      w0_min = std::min(w0_min, s.value);
    }
    moment_terms[i] = kfac / std::pow(s.value, cfg.k + 1);
  }
  res.report.included = static_cast<long>(samples.size());

  const double m = static_cast<double>(samples.size());
  const double w_target = static_cast<double>(cfg.k) / (cfg.k + 1);
  const double w_freq = static_cast<double>(w1) / m;
  const MeanSe mom = mean_and_se(moment_terms);
  add_stat(res.report, "min_value", vmin);
  add_stat(res.report, "max_value", vmax);
  add_stat(res.report, "w1_frequency", w_freq, std::sqrt(w_target * (1 - w_target) / m));
  add_stat(res.report, "moment_estimate", mom.mean, mom.se, samples.front().method);
  for (int q = 1; q <= 9; ++q) {
    add_stat(res.report, "quantile_" + std::to_string(q * 10),
             samples[static_cast<std::size_t>(0.1 * q * m)].value);
  }

  const double lower = std::pow(2.0, -cfg.d);
  const double upper = std::pow(3.0, cfg.d);
  add_check(res.report, "values_above_2_pow_minus_d", vmin, ">=", lower);
  add_check(res.report, "values_below_3_pow_d", vmax, "<=", upper);
  if (std::isfinite(w0_min)) {
    add_check(res.report, "w0_branch_at_least_1", w0_min, ">=", 1.0);
  }
  add_check(res.report, "w_frequency_3sigma", std::fabs(w_freq - w_target), "<=",
            3.0 * std::sqrt(w_target * (1 - w_target) / m));
  const double bound = std::pow(2.0, cfg.d * (cfg.k + 1)) * kfac;
  add_check(res.report, "moment_within_factorial_bound", mom.mean, "<=", bound + 3.0 * mom.se);

  // Full export with the method tag column.
  std::string csv = "k,d,w,value,method\n";
  for (const DkSample& s : samples) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), s.value);
    (void)ec;
    csv += std::to_string(s.k) + "," + std::to_string(s.d) + "," + std::to_string(s.w) + "," +
           std::string(buf, ptr) + "," + s.method + "\n";
  }
  res.report.tables["csv_files"] = {"dk_samples.csv"};
  res.histogram_names.clear();
  res.extra_files.emplace_back("dk_samples.csv", std::move(csv));
  return res;
}

}  // namespace

bool ExperimentReport::all_pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["artifact_version"] = version;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["config"] = config;
  j["config_hash"] = config_hash;
  j["included"] = included;
  j["excluded"] = excluded;
  nlohmann::json stats_j = nlohmann::json::array();
  for (const StatValue& s : stats) {
    stats_j.push_back({{"name", s.name}, {"value", s.value}, {"se", s.se}, {"method", s.method}});
  }
  j["stats"] = stats_j;
  nlohmann::json checks_j = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    checks_j.push_back({{"name", c.name},
                        {"value", c.value},
                        {"bound", c.bound},
                        {"relation", c.relation},
                        {"pass", c.pass}});
  }
  j["checks"] = checks_j;
  j["tables"] = tables;
  return j;
}

ExperimentResult run_figure31(const RunConfig& cfg) {
  Timer timer;
  ExperimentResult res = figure31_impl(cfg);
  res.report.wall_seconds = timer.seconds();
  return res;
}
ExperimentResult run_edge_experiment(const RunConfig& cfg) {
  Timer timer;
  ExperimentResult res = edges_impl(cfg);
  res.report.wall_seconds = timer.seconds();
  return res;
}
ExperimentResult run_ks_comparison(const RunConfig& cfg) {
  Timer timer;
  ExperimentResult res = ks_impl(cfg);
  res.report.wall_seconds = timer.seconds();
  return res;
}
ExperimentResult run_diameter_tail(const RunConfig& cfg) {
  Timer timer;
  ExperimentResult res = diameter_impl(cfg);
  res.report.wall_seconds = timer.seconds();
  return res;
}
ExperimentResult run_moment_convergence(const RunConfig& cfg) {
  Timer timer;
  ExperimentResult res = moments_impl(cfg);
  res.report.wall_seconds = timer.seconds();
  return res;
}
ExperimentResult run_lebesgue_convergence(const RunConfig& cfg) {
  Timer timer;
  ExperimentResult res = lebesgue_impl(cfg);
  res.report.wall_seconds = timer.seconds();
  return res;
}
ExperimentResult run_independence(const RunConfig& cfg) {
  Timer timer;
  ExperimentResult res = independence_impl(cfg);
  res.report.wall_seconds = timer.seconds();
  return res;
}
ExperimentResult run_dk_sample(const RunConfig& cfg) {
  Timer timer;
  ExperimentResult res = dk_impl(cfg);
  res.report.wall_seconds = timer.seconds();
  return res;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  if (cfg.experiment == "figure31") return run_figure31(cfg);
  if (cfg.experiment == "edges") return run_edge_experiment(cfg);
  if (cfg.experiment == "ks") return run_ks_comparison(cfg);
  if (cfg.experiment == "diameter-tail") return run_diameter_tail(cfg);
  if (cfg.experiment == "moments") return run_moment_convergence(cfg);
  if (cfg.experiment == "lebesgue") return run_lebesgue_convergence(cfg);
  if (cfg.experiment == "independence") return run_independence(cfg);
  if (cfg.experiment == "dk-sample") return run_dk_sample(cfg);
  throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

std::string report_json_string(const ExperimentReport& report) {
  return report.to_json().dump(2) + "\n";
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, ptr);
}

}  // namespace

std::string trial_table_csv(const TrialTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      append_double(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const Histogram& hist) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    append_double(out, hist.bin_lo(i));
    out += ',';
    append_double(out, hist.bin_hi(i));
    out += ',';
    out += std::to_string(hist.counts[i]);
    out += '\n';
  }
  return out;
}

}  // namespace vorsim
