#include "vorsim/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vorsim {

const char* const kKnownExperiments[8] = {"figure31",      "edges",  "ks",
                                          "diameter-tail", "moments", "lebesgue",
                                          "independence",  "dk-sample"};

bool is_known_experiment(const std::string& name) {
  for (const char* e : kKnownExperiments) {
    if (name == e) return true;
  }
  return false;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument("config field '" + field + "': " + what);
}

std::vector<Point> parse_probes(const nlohmann::json& j, const std::string& field) {
  std::vector<Point> out;
  if (!j.is_array()) fail(field, "expected an array");
  if (!j.empty() && j.front().is_number()) {
    out.push_back(j.get<Point>());
    return out;
  }
  for (const auto& p : j) {
    if (!p.is_array()) fail(field, "expected arrays of coordinates");
    out.push_back(p.get<Point>());
  }
  return out;
}

Density density_from_json(const nlohmann::json& j, int d);

Density mixture_from_json(const nlohmann::json& j, int d) {
  if (!j.contains("weights") || !j.contains("components")) {
    fail("density", "mixture needs 'weights' and 'components'");
  }
  std::vector<double> w = j.at("weights").get<std::vector<double>>();
  std::vector<Density> comps;
  for (const auto& c : j.at("components")) comps.push_back(density_from_json(c, d));
  return Density::mixture(std::move(w), std::move(comps));
}

Density density_from_json(const nlohmann::json& j, int d) {
  if (!j.is_object() || !j.contains("type")) fail("density", "expected an object with 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform_box") {
    return Density::uniform_box(j.at("lo").get<Point>(), j.at("hi").get<Point>());
  }
  if (type == "gaussian") {
    Point mean = j.contains("mean") ? j.at("mean").get<Point>() : Point(d, 0.0);
    const double sigma = j.contains("sigma") ? j.at("sigma").get<double>() : 1.0;
    return Density::isotropic_gaussian(std::move(mean), sigma);
  }
  if (type == "mixture") return mixture_from_json(j, d);
  if (type == "grid") {
    if (j.contains("csv")) return Density::grid_from_csv(j.at("csv").get<std::string>());
    const Point origin = j.at("origin").get<Point>();
    const double cell_size = j.at("cell_size").get<double>();
    const auto& vals = j.at("values");
    if (!vals.is_array()) fail("density", "grid 'values' must be an array");
    if (!vals.empty() && vals.front().is_array()) {
      std::vector<double> flat;
      const std::size_t cols = vals.front().size();
      for (const auto& row : vals) {
        const auto r = row.get<std::vector<double>>();
        if (r.size() != cols) fail("density", "ragged grid rows");
        flat.insert(flat.end(), r.begin(), r.end());
      }
      return Density::grid(origin, cell_size, {vals.size(), cols}, std::move(flat));
    }
    std::vector<double> flat = vals.get<std::vector<double>>();
    return Density::grid(origin, cell_size, {flat.size()}, std::move(flat));
  }
  fail("density", "unknown type '" + type + "'");
}

}  // namespace

RunConfig parse_config_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  static const std::set<std::string> known = {
      "experiment", "seed",        "d",          "density",     "probe",
      "probes",     "n",           "n_ladder",   "trials",      "k",
      "bin_width",  "t_grid",      "mc_inner",   "dk_samples",  "moment_outer",
      "permutations", "statistic", "threads",    "out",         "check"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) fail(key, "unknown key");
  }
  RunConfig cfg;
  if (j.contains("experiment")) cfg.experiment = j.at("experiment").get<std::string>();
  if (j.contains("seed")) {
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.has_seed = true;
  }
  if (j.contains("d")) cfg.d = j.at("d").get<int>();
  if (j.contains("density")) cfg.density = j.at("density");
  if (j.contains("probe")) cfg.probes = parse_probes(j.at("probe"), "probe");
  if (j.contains("probes")) cfg.probes = parse_probes(j.at("probes"), "probes");
  if (j.contains("n")) cfg.n = j.at("n").get<long>();
  if (j.contains("n_ladder")) cfg.n_ladder = j.at("n_ladder").get<std::vector<long>>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<long>();
  if (j.contains("k")) cfg.k = j.at("k").get<int>();
  if (j.contains("bin_width")) cfg.bin_width = j.at("bin_width").get<double>();
  if (j.contains("t_grid")) cfg.t_grid = j.at("t_grid").get<std::vector<double>>();
  if (j.contains("mc_inner")) cfg.mc_inner = j.at("mc_inner").get<long>();
  if (j.contains("dk_samples")) cfg.dk_samples = j.at("dk_samples").get<long>();
  if (j.contains("moment_outer")) cfg.moment_outer = j.at("moment_outer").get<long>();
  if (j.contains("permutations")) cfg.permutations = j.at("permutations").get<int>();
  if (j.contains("statistic")) cfg.statistic = j.at("statistic").get<std::string>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("check")) cfg.check = j.at("check").get<bool>();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  return parse_config_json(j);
}

void finalize_config(RunConfig& cfg) {
  if (cfg.experiment.empty()) fail("experiment", "missing");
  if (!is_known_experiment(cfg.experiment)) {
    fail("experiment", "unknown experiment name '" + cfg.experiment + "'");
  }
  if (!cfg.has_seed) fail("seed", "missing (no silent entropy)");
  if (cfg.d < 1) fail("d", "must be >= 1");
  if (cfg.trials < 1) fail("trials", "must be >= 1");
  if (cfg.n < 0) fail("n", "must be >= 0");
  if (cfg.k < 1) fail("k", "must be >= 1");
  if (!(cfg.bin_width > 0.0)) fail("bin_width", "must be > 0");
  if (cfg.mc_inner < 1) fail("mc_inner", "must be >= 1");
  if (cfg.dk_samples < 1) fail("dk_samples", "must be >= 1");
  if (cfg.moment_outer < 100) fail("moment_outer", "must be >= 100");
  if (cfg.permutations < 0) fail("permutations", "must be >= 0");
  if (cfg.statistic != "edge_count" && cfg.statistic != "area") {
    fail("statistic", "must be 'edge_count' or 'area'");
  }
  for (const auto& ladder_n : cfg.n_ladder) {
    if (ladder_n < 1) fail("n_ladder", "entries must be >= 1");
  }
  for (const auto& t : cfg.t_grid) {
    if (!(t >= 0.0)) fail("t_grid", "entries must be >= 0");
  }
  for (const auto& p : cfg.probes) {
    if (static_cast<int>(p.size()) != cfg.d) fail("probes", "probe dimension != d");
  }

  // Per-experiment defaults.
  auto default_probe = [&](Point p) {
    if (cfg.probes.empty()) cfg.probes.push_back(std::move(p));
  };
  if (cfg.experiment == "figure31") {
    default_probe(Point(cfg.d, 0.0));
  } else if (cfg.experiment == "edges") {
    default_probe(Point(cfg.d, 0.0));
    if (cfg.n_ladder.empty()) cfg.n_ladder = {250, 1000, 4000};
  } else if (cfg.experiment == "ks") {
    default_probe(Point(cfg.d, 0.0));
    if (cfg.n_ladder.empty()) cfg.n_ladder = {100, 400, 1600};
  } else if (cfg.experiment == "diameter-tail") {
    default_probe(Point(cfg.d, 0.0));
    if (cfg.t_grid.empty()) {
      if (cfg.d == 2) {
        for (double t = 1.5; t <= 6.01; t += 0.25) cfg.t_grid.push_back(t);
      } else {
        for (double t = 1.0; t <= 10.01; t += 0.5) cfg.t_grid.push_back(t);
      }
    }
  } else if (cfg.experiment == "moments") {
    default_probe(Point(cfg.d, 0.0));
    if (cfg.n_ladder.empty()) cfg.n_ladder = {250, 1000, 4000};
  } else if (cfg.experiment == "lebesgue") {
    default_probe(Point(cfg.d, 0.0));
    if (cfg.n_ladder.empty()) cfg.n_ladder = {250, 1000};
  } else if (cfg.experiment == "independence") {
    if (cfg.probes.empty()) {
      Point p1(cfg.d, 0.0), p2(cfg.d, 0.0);
      p1[0] = -0.5;
      p2[0] = 0.5;
      cfg.probes = {std::move(p1), std::move(p2)};
    }
    if (cfg.probes.size() != 2) fail("probes", "independence needs exactly 2 probes");
    if (cfg.probes[0] == cfg.probes[1]) fail("probes", "probes must be distinct");
  }
}

Density make_density(const RunConfig& cfg) {
  if (cfg.density.is_null() || cfg.density.empty()) {
    return Density::uniform_box(Point(cfg.d, -1.0), Point(cfg.d, 1.0));
  }
  Density dens = density_from_json(cfg.density, cfg.d);
  if (dens.dimension() != cfg.d) fail("density", "density dimension != d");
  return dens;
}

nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;
  j["d"] = cfg.d;
  if (!cfg.density.is_null() && !cfg.density.empty()) {
    j["density"] = cfg.density;
  } else {
    j["density"] = {{"type", "uniform_box"},
                    {"lo", Point(cfg.d, -1.0)},
                    {"hi", Point(cfg.d, 1.0)}};
  }
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : cfg.probes) probes.push_back(p);
  j["probes"] = probes;
  j["n"] = cfg.n;
  j["n_ladder"] = cfg.n_ladder;
  j["trials"] = cfg.trials;
  j["k"] = cfg.k;
  j["bin_width"] = cfg.bin_width;
  j["t_grid"] = cfg.t_grid;
  j["mc_inner"] = cfg.mc_inner;
  j["dk_samples"] = cfg.dk_samples;
  j["moment_outer"] = cfg.moment_outer;
  j["permutations"] = cfg.permutations;
  j["statistic"] = cfg.statistic;
  return j;
}

std::string config_hash_hex(const nlohmann::json& echo) {
  const std::string s = echo.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace vorsim
