// Command-line front end: config parsing, seed management, experiment
// dispatch, and file emission.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vorsim/experiments.hpp"
#include "vorsim/run_config.hpp"

namespace {

struct FlagValues {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> d;
  std::optional<long> n;
  std::optional<long> trials;
  std::optional<int> k;
  std::optional<double> bin_width;
  std::optional<std::string> out;
  std::optional<int> threads;
  bool check = false;
  std::vector<long> n_ladder;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> probes;
  std::optional<std::string> density_json;
  std::optional<std::string> statistic;
  std::optional<long> mc_inner;
  std::optional<long> dk_samples;
  std::optional<long> moment_outer;
  std::optional<int> permutations;
};

void add_common_options(CLI::App* sub, FlagValues& f) {
  sub->add_option("--config", f.config_path, "JSON config file; flags override its values");
  sub->add_option("--seed", f.seed, "master seed (64-bit unsigned); required here or in the config");
  sub->add_option("--d", f.d, "dimension");
  sub->add_option("--n", f.n, "points per trial");
  sub->add_option("--trials", f.trials, "number of trials");
  sub->add_option("--k", f.k, "moment order / D_k index");
  sub->add_option("--bin-width", f.bin_width, "histogram bin width (default 0.05)");
  sub->add_option("--out", f.out, "output directory (report.json, CSV tables)");
  sub->add_option("--threads", f.threads, "worker threads; 0 = all cores (output is independent of this)");
  sub->add_flag("--check", f.check, "exit 2 if any declared tolerance fails");
  sub->add_option("--n-ladder", f.n_ladder, "ladder of n values")->delimiter(',');
  sub->add_option("--t-grid", f.t_grid, "diameter-tail t grid")->delimiter(',');
  sub->add_option("--probe", f.probes,
                  "probe point as x,y (repeat the flag for several probes)")
      ->delimiter(',');
  sub->add_option("--density", f.density_json, "density spec as inline JSON");
  sub->add_option("--statistic", f.statistic, "ks statistic: edge_count or area");
  sub->add_option("--mc-inner", f.mc_inner, "inner MC samples for union volumes");
  sub->add_option("--samples", f.dk_samples, "number of D_k samples (dk-sample)");
  sub->add_option("--moment-outer", f.moment_outer, "outer draws for the limiting moment target");
  sub->add_option("--permutations", f.permutations, "independence permutation-null count");
}

vorsim::RunConfig build_config(const std::string& experiment, const FlagValues& f) {
  vorsim::RunConfig cfg;
  if (!f.config_path.empty()) cfg = vorsim::parse_config_file(f.config_path);
  if (cfg.experiment.empty()) cfg.experiment = experiment;
  if (cfg.experiment != experiment) {
    throw std::invalid_argument("config field 'experiment': file says '" + cfg.experiment +
                                "' but the subcommand is '" + experiment + "'");
  }
  if (f.seed) {
    cfg.seed = *f.seed;
    cfg.has_seed = true;
  }
  if (f.d) cfg.d = *f.d;
  if (f.n) cfg.n = *f.n;
  if (f.trials) cfg.trials = *f.trials;
  if (f.k) cfg.k = *f.k;
  if (f.bin_width) cfg.bin_width = *f.bin_width;
  if (f.out) cfg.out_dir = *f.out;
  if (f.threads) cfg.threads = *f.threads;
  if (f.check) cfg.check = true;
  if (!f.n_ladder.empty()) cfg.n_ladder = f.n_ladder;
  if (!f.t_grid.empty()) cfg.t_grid = f.t_grid;
  if (!f.probes.empty()) {
    cfg.probes.clear();
    for (const auto& p : f.probes) cfg.probes.push_back(p);
  }
  if (f.density_json) {
    try {
      cfg.density = nlohmann::json::parse(*f.density_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("config field 'density': ") + e.what());
    }
  }
  if (f.statistic) cfg.statistic = *f.statistic;
  if (f.mc_inner) cfg.mc_inner = *f.mc_inner;
  if (f.dk_samples) cfg.dk_samples = *f.dk_samples;
  if (f.moment_outer) cfg.moment_outer = *f.moment_outer;
  if (f.permutations) cfg.permutations = *f.permutations;

  const char* env_out = std::getenv("VORSIM_OUT");
  if (cfg.out_dir.empty() && env_out != nullptr) cfg.out_dir = env_out;

  vorsim::finalize_config(cfg);
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int run(const std::string& experiment, const FlagValues& flags) {
  vorsim::RunConfig cfg;
  try {
    cfg = build_config(experiment, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  vorsim::ExperimentResult res;
  try {
    res = vorsim::run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const vorsim::ExperimentReport& rep = res.report;
  std::printf("%s  seed=%llu  config_hash=%s\n", rep.experiment.c_str(),
              static_cast<unsigned long long>(rep.seed), rep.config_hash.c_str());
  for (const vorsim::StatValue& s : rep.stats) {
    if (s.se > 0.0) {
      std::printf("  %-34s %.6g +- %.3g  [%s]\n", s.name.c_str(), s.value, s.se,
                  s.method.c_str());
    } else {
      std::printf("  %-34s %.6g  [%s]\n", s.name.c_str(), s.value, s.method.c_str());
    }
  }
  for (const vorsim::CheckResult& c : rep.checks) {
    std::printf("  %s  %-34s %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.value, c.relation.c_str(), c.bound);
  }
  std::printf("  included=%ld excluded=%ld  wall=%.2fs\n", rep.included, rep.excluded,
              rep.wall_seconds);

  if (!cfg.out_dir.empty()) {
    try {
      const std::filesystem::path dir(cfg.out_dir);
      std::filesystem::create_directories(dir);
      write_file(dir / "report.json", vorsim::report_json_string(rep));
      write_file(dir / "trials.csv", vorsim::trial_table_csv(res.trial_table));
      for (std::size_t i = 0; i < res.histograms.size(); ++i) {
        write_file(dir / (res.histogram_names[i] + ".csv"),
                   vorsim::histogram_csv(res.histograms[i]));
      }
      for (const auto& [name, content] : res.extra_files) {
        write_file(dir / name, content);
      }
      std::printf("  wrote %s\n", (dir / "report.json").string().c_str());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  if (cfg.check && !rep.all_pass()) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Voronoi cell simulations and experiments"};
  app.require_subcommand(1);

  struct SubEntry {
    CLI::App* sub;
    FlagValues flags;
    std::string name;
  };
  std::vector<std::unique_ptr<SubEntry>> entries;
  const std::pair<const char*, const char*> subs[] = {
      {"figure31", "histograms of n*mu(L_n(0)) and n*mu(A_n(0)), 1000 trials at n=1000"},
      {"edges", "mean and second moment of A_n / P_n bisector edge counts"},
      {"ks", "two-sample KS between A_n and P_n statistics over an n-ladder"},
      {"diameter-tail", "tail of the containing-cell diameter vs exp(-c t^d)"},
      {"moments", "E[(n mu(L_n))^k] along an n-ladder vs the limiting moment"},
      {"lebesgue", "KS between n f(x) lambda(L_n) and n mu(L_n)"},
      {"independence", "joint vs product ECDF for two disjoint probes"},
      {"dk-sample", "draw D_k samples and export them as CSV"},
  };
  for (const auto& [name, desc] : subs) {
    auto entry = std::make_unique<SubEntry>();
    entry->sub = app.add_subcommand(name, desc);
    entry->name = name;
    add_common_options(entry->sub, entry->flags);
    entries.push_back(std::move(entry));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& entry : entries) {
    if (entry->sub->parsed()) return run(entry->name, entry->flags);
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
