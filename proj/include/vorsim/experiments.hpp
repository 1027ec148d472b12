#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vorsim/cells.hpp"
#include "vorsim/run_config.hpp"
#include "vorsim/stats.hpp"

namespace vorsim {

struct StatValue {
  std::string name;
  double value = 0.0;
  double se = 0.0;
  std::string method = "exact";
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", "=="
  bool pass = false;
};

// Per-trial rows for the CSV emission.
struct TrialTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::string config_hash;
  std::string version;
  std::vector<StatValue> stats;
  std::vector<CheckResult> checks;
  long included = 0;
  long excluded = 0;
  nlohmann::json tables;  // structured per-experiment payload
  double wall_seconds = 0.0;  // printed to the console, never serialized

  bool all_pass() const;
  nlohmann::json to_json() const;
};

struct ExperimentResult {
  ExperimentReport report;
  TrialTable trial_table;
  std::vector<Histogram> histograms;       // figure31: L then A
  std::vector<std::string> histogram_names;
  std::vector<std::pair<std::string, std::string>> extra_files;  // name -> content
};

ExperimentResult run_figure31(const RunConfig& cfg);
ExperimentResult run_edge_experiment(const RunConfig& cfg);
ExperimentResult run_ks_comparison(const RunConfig& cfg);
ExperimentResult run_diameter_tail(const RunConfig& cfg);
ExperimentResult run_moment_convergence(const RunConfig& cfg);
ExperimentResult run_lebesgue_convergence(const RunConfig& cfg);
ExperimentResult run_independence(const RunConfig& cfg);
ExperimentResult run_dk_sample(const RunConfig& cfg);

ExperimentResult run_experiment(const RunConfig& cfg);

// Deterministic serializations (what the CLI writes to disk).
std::string report_json_string(const ExperimentReport& report);
std::string trial_table_csv(const TrialTable& table);
std::string histogram_csv(const Histogram& hist);

extern const char* const kArtifactVersion;

}  // namespace vorsim
