#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "vorsim/experiments.hpp"

using namespace vorsim;

namespace {

RunConfig small_config(const std::string& experiment) {
  RunConfig cfg;
  cfg.experiment = experiment;
  cfg.seed = 424242;
  cfg.has_seed = true;
  cfg.d = 2;
  cfg.trials = 60;
  cfg.n = 150;
  cfg.n_ladder = {60, 150};
  cfg.moment_outer = 20000;
  cfg.dk_samples = 5000;
  cfg.mc_inner = 2048;
  cfg.permutations = 19;
  cfg.threads = 2;
  finalize_config(cfg);
  return cfg;
}

}  // namespace

TEST_CASE("config parsing: defaults, errors, unknown keys") {
  RunConfig cfg = parse_config_json({{"experiment", "figure31"}, {"seed", 42}});
  finalize_config(cfg);
  CHECK(cfg.n == 1000);
  CHECK(cfg.trials == 1000);
  CHECK(cfg.bin_width == doctest::Approx(0.05));
  CHECK(cfg.probes.size() == 1);

  RunConfig bad = parse_config_json({{"experiment", "figure31"}, {"seed", 1}, {"trials", 0}});
  CHECK_THROWS_WITH_AS(finalize_config(bad),
                       "config field 'trials': must be >= 1", std::invalid_argument);

  CHECK_THROWS_AS(parse_config_json({{"experiment", "figure31"}, {"sede", 1}}),
                  std::invalid_argument);

  RunConfig noseed = parse_config_json({{"experiment", "figure31"}});
  CHECK_THROWS_AS(finalize_config(noseed), std::invalid_argument);

  RunConfig unknown = parse_config_json({{"experiment", "warp"}, {"seed", 1}});
  CHECK_THROWS_AS(finalize_config(unknown), std::invalid_argument);
}

TEST_CASE("figure31: conservation, reproducibility, thread independence") {
  const RunConfig cfg = small_config("figure31");
  const ExperimentResult a = run_figure31(cfg);
  CHECK(a.report.included + a.report.excluded == cfg.trials);
  REQUIRE(a.histograms.size() == 2);
  long sum = 0;
  for (long c : a.histograms[0].counts) sum += c;
  CHECK(sum == a.report.included);

  RunConfig cfg1 = cfg;
  cfg1.threads = 1;
  const ExperimentResult b = run_figure31(cfg1);
  CHECK(report_json_string(a.report) == report_json_string(b.report));
  CHECK(trial_table_csv(a.trial_table) == trial_table_csv(b.trial_table));
  CHECK(histogram_csv(a.histograms[0]) == histogram_csv(b.histograms[0]));
  CHECK(histogram_csv(a.histograms[1]) == histogram_csv(b.histograms[1]));
}

TEST_CASE("figure31 rejects d != 2") {
  RunConfig cfg = small_config("figure31");
  cfg.d = 3;
  cfg.probes = {{0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(run_figure31(cfg), std::invalid_argument);
}

TEST_CASE("edges: report structure and d=2 gate") {
  RunConfig cfg = small_config("edges");
  cfg.n_ladder = {100};
  cfg.n = 100;
  const ExperimentResult res = run_edge_experiment(cfg);
  bool found = false;
  for (const StatValue& s : res.report.stats) {
    if (s.name == "mean_edges_a_n100") {
      found = true;
      CHECK(s.value > 3.0);
      CHECK(s.value < 9.0);
    }
  }
  CHECK(found);

  RunConfig bad = cfg;
  bad.d = 1;
  bad.probes = {{0.0}};
  CHECK_THROWS_AS(run_edge_experiment(bad), std::invalid_argument);
}

TEST_CASE("ks experiment: stats well-formed for both statistics") {
  RunConfig cfg = small_config("ks");
  cfg.trials = 80;
  cfg.n_ladder = {60, 150};
  const ExperimentResult res = run_ks_comparison(cfg);
  // KS in [0,1] and table present.
  for (const StatValue& s : res.report.stats) {
    CHECK(s.value >= 0.0);
    CHECK(s.value <= 1.0);
  }
  CHECK(res.report.tables.contains("per_n"));

  RunConfig area_cfg = cfg;
  area_cfg.statistic = "area";
  const ExperimentResult area_res = run_ks_comparison(area_cfg);
  for (const StatValue& s : area_res.report.stats) {
    CHECK(s.value >= 0.0);
    CHECK(s.value <= 1.0);
  }
  // Different statistic, different KS values in general.
  CHECK(report_json_string(area_res.report) != report_json_string(res.report));
}

TEST_CASE("diameter tail: same-sample tails are monotone and start at 1") {
  RunConfig cfg = small_config("diameter-tail");
  cfg.trials = 400;
  cfg.n = 200;
  cfg.t_grid = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
  const ExperimentResult res = run_diameter_tail(cfg);
  bool monotone_checked = false;
  for (const CheckResult& c : res.report.checks) {
    if (c.name == "tail_monotone") {
      monotone_checked = true;
      CHECK(c.pass);
    }
  }
  CHECK(monotone_checked);
  const auto& first = res.report.tables["tail"][0];
  CHECK(first["t"].get<double>() == 0.0);
  CHECK(first["p_hat"].get<double>() == 1.0);  // every diameter is >= 0
  double prev = 2.0;
  for (const auto& row : res.report.tables["tail"]) {
    const double p = row["p_hat"].get<double>();
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("moments: d=1 small run lands near 1.5") {
  RunConfig cfg = small_config("moments");
  cfg.d = 1;
  cfg.probes = {{0.0}};
  cfg.density = {{"type", "uniform_box"}, {"lo", {-1.0}}, {"hi", {1.0}}};
  cfg.k = 1;
  cfg.trials = 400;
  cfg.n_ladder = {200, 800};
  const ExperimentResult res = run_moment_convergence(cfg);
  double target = 0.0;
  for (const StatValue& s : res.report.stats) {
    if (s.name == "limiting_moment_target") target = s.value;
  }
  CHECK(target == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("lebesgue: uniform density gives exact KS zero") {
  RunConfig cfg = small_config("lebesgue");
  cfg.trials = 100;
  cfg.n_ladder = {100, 200};
  const ExperimentResult res = run_lebesgue_convergence(cfg);
  for (const CheckResult& c : res.report.checks) {
    if (c.name.rfind("ks_identity", 0) == 0) CHECK(c.pass);
  }
  CHECK(res.report.all_pass());
}

TEST_CASE("independence: rejects coincident probes, small run is sane") {
  RunConfig cfg = small_config("independence");
  cfg.trials = 200;
  cfg.n = 300;
  const ExperimentResult res = run_independence(cfg);
  bool has_sup = false;
  for (const StatValue& s : res.report.stats) {
    if (s.name == "sup_joint_minus_product") {
      has_sup = true;
      CHECK(s.value >= 0.0);
      CHECK(s.value <= 1.0);
    }
  }
  CHECK(has_sup);

  RunConfig bad = cfg;
  bad.probes = {{0.25, 0.25}, {0.25, 0.25}};
  CHECK_THROWS_AS(run_independence(bad), std::invalid_argument);
}

TEST_CASE("dk-sample: export checks and bounds") {
  RunConfig cfg = small_config("dk-sample");
  cfg.k = 1;
  cfg.d = 2;
  cfg.dk_samples = 20000;
  const ExperimentResult res = run_dk_sample(cfg);
  CHECK(res.report.all_pass());
  REQUIRE(res.extra_files.size() == 1);
  CHECK(res.extra_files[0].first == "dk_samples.csv");
  CHECK(res.extra_files[0].second.rfind("k,d,w,value,method\n", 0) == 0);
}

TEST_CASE("run_experiment dispatch matches subcommand names") {
  RunConfig cfg = small_config("figure31");
  cfg.trials = 10;
  cfg.n = 50;
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.report.experiment == "figure31");
}
