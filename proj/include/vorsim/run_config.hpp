#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vorsim/density.hpp"
#include "vorsim/geom.hpp"

namespace vorsim {

// One validated run description. `threads`, `out_dir` and `check` are
// execution parameters: they do not enter the config echo or its hash, so a
// rerun with a different thread count still produces byte-identical outputs.
struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  bool has_seed = false;

  int d = 2;
  nlohmann::json density;            // empty -> uniform box [-1,1]^d
  std::vector<Point> probes;         // empty -> experiment default
  long n = 1000;
  std::vector<long> n_ladder;        // empty -> experiment default
  long trials = 1000;
  int k = 1;
  double bin_width = 0.05;
  std::vector<double> t_grid;        // empty -> experiment default
  long mc_inner = 100000;
  long dk_samples = 100000;
  long moment_outer = 1000000;
  int permutations = 99;
  std::string statistic = "edge_count";

  int threads = 0;  // 0 = all cores
  std::string out_dir;
  bool check = false;
};

// Parses and validates a config JSON object (e.g. the contents of --config).
// Unknown keys and invalid ranges are errors naming the offending field.
RunConfig parse_config_json(const nlohmann::json& j);
RunConfig parse_config_file(const std::string& path);

// Applies per-experiment defaults to fields the user left empty and
// validates experiment-specific constraints.
void finalize_config(RunConfig& cfg);

// Builds the density object: the `density` JSON if present, otherwise the
// uniform box [-1,1]^d.
Density make_density(const RunConfig& cfg);

// Logical fields only (no threads/out_dir/check), sorted keys.
nlohmann::json config_echo(const RunConfig& cfg);
std::string config_hash_hex(const nlohmann::json& echo);

extern const char* const kKnownExperiments[8];
bool is_known_experiment(const std::string& name);

}  // namespace vorsim
