#include "hbt/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hbt {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError(key + ": expected a finite number, got '" + value + "'");
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& value) {
  Int out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "schema_version",      "seed",
      "geometry.d_m",        "geometry.D_m",          "geometry.k_per_m",
      "source.mu",           "source.p0",             "source.p1",
      "source.p2",           "spin.mode",             "coulomb.enabled",
      "coulomb.depth",       "coulomb.sigma_k_rel",   "coulomb.spread_samples",
      "integrator.dt_s",     "integrator.t_max_s",    "integrator.v_tol",
      "integrator.z_stop_m", "screen.x_min_m",        "screen.x_max_m",
      "screen.n_points",     "phase.delta_min_rad",   "phase.delta_max_rad",
      "phase.n_points",      "oracle.bins",           "oracle.statistics",
      "oracle.envelope",     "sweep.parameter",       "sweep.values",
  };
  return keys;
}

void validate(const RunConfig& c) {
  const Geometry geom = c.geometry();
  c.statistics().validate();
  if (!(c.coulomb_depth >= 0.0 && c.coulomb_depth <= 1.0))
    throw ConfigError("coulomb.depth must lie in [0, 1]");
  if (!(c.sigma_k_rel > 0.0 && c.sigma_k_rel < 0.2))
    throw ConfigError("coulomb.sigma_k_rel must lie in (0, 0.2)");
  if (c.spread_samples != 0 && c.spread_samples < 100)
    throw ConfigError("coulomb.spread_samples must be 0 or at least 100");
  c.integrator().validate(geom.tip_separation());
  c.screen().validate();
  if (!(c.delta_min_rad < c.delta_max_rad) || c.phase_points < 2)
    throw ConfigError("phase grid needs delta_min_rad < delta_max_rad and n_points >= 2");
  if (c.oracle_bins < 3 || c.oracle_bins % 2 == 0 || c.oracle_bins > 15)
    throw ConfigError("oracle.bins must be odd and in [3, 15]");
  if (c.oracle_envelope != "flat" && c.oracle_envelope != "gaussian")
    throw ConfigError("oracle.envelope must be flat or gaussian");
  if (c.sweep_parameter) {
    const auto& p = *c.sweep_parameter;
    if (p != "d" && p != "k" && p != "D" && p != "mu")
      throw ConfigError("sweep.parameter must be one of d, k, D, mu");
  }
  if (!c.sweep_values.empty() && !c.sweep_parameter)
    throw ConfigError("sweep.values given without sweep.parameter");
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

SourceStatistics RunConfig::statistics() const {
  if (mu) return poissonian_stats(*mu);
  return explicit_stats.value();
}

coulomb::IntegratorConfig RunConfig::integrator() const {
  auto cfg = coulomb::IntegratorConfig::defaults_for(d_m);
  cfg.dt = dt_s;
  cfg.t_max = t_max_s;
  cfg.v_tol = v_tol;
  cfg.z_stop = z_stop_m;
  return cfg;
}

pattern::CoulombOverlay RunConfig::overlay() const {
  pattern::CoulombOverlay o;
  o.enabled = coulomb_enabled;
  o.depth = coulomb_depth;
  o.sigma_k_rel = sigma_k_rel;
  o.spread_samples = spread_samples;
  o.seed = seed;
  return o;
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("schema_version", std::to_string(kSchemaVersion));
  e.emplace_back("seed", std::to_string(seed));
  e.emplace_back("geometry.d_m", format_double(d_m));
  e.emplace_back("geometry.D_m", format_double(D_m));
  e.emplace_back("geometry.k_per_m", format_double(k_per_m));
  if (mu) {
    e.emplace_back("source.mu", format_double(*mu));
  } else {
    e.emplace_back("source.p0", format_double(explicit_stats->p0));
    e.emplace_back("source.p1", format_double(explicit_stats->p1));
    e.emplace_back("source.p2", format_double(explicit_stats->p2));
  }
  e.emplace_back("spin.mode", std::string(to_string(spin_mode)));
  e.emplace_back("coulomb.enabled", coulomb_enabled ? "true" : "false");
  e.emplace_back("coulomb.depth", format_double(coulomb_depth));
  e.emplace_back("coulomb.sigma_k_rel", format_double(sigma_k_rel));
  e.emplace_back("coulomb.spread_samples", std::to_string(spread_samples));
  e.emplace_back("integrator.dt_s", format_double(dt_s));
  e.emplace_back("integrator.t_max_s", format_double(t_max_s));
  e.emplace_back("integrator.v_tol", format_double(v_tol));
  e.emplace_back("integrator.z_stop_m", format_double(z_stop_m));
  e.emplace_back("screen.x_min_m", format_double(x_min_m));
  e.emplace_back("screen.x_max_m", format_double(x_max_m));
  e.emplace_back("screen.n_points", std::to_string(n_points));
  e.emplace_back("phase.delta_min_rad", format_double(delta_min_rad));
  e.emplace_back("phase.delta_max_rad", format_double(delta_max_rad));
  e.emplace_back("phase.n_points", std::to_string(phase_points));
  e.emplace_back("oracle.bins", std::to_string(oracle_bins));
  e.emplace_back("oracle.statistics",
                 oracle_statistics == fock::Statistics::fermion ? "fermion" : "boson");
  e.emplace_back("oracle.envelope", oracle_envelope);
  if (sweep_parameter) {
    e.emplace_back("sweep.parameter", *sweep_parameter);
    std::string list;
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
      if (i) list += ", ";
      list += format_double(sweep_values[i]);
    }
    if (!sweep_values.empty()) e.emplace_back("sweep.values", list);
  }
  return e;
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

RunConfig config_from_entries(const std::map<std::string, std::string>& entries) {
  for (const auto& [k, v] : entries)
    if (!known_keys().count(k)) throw ConfigError("unknown key '" + k + "'");

  auto get = [&](const std::string& k) -> const std::string* {
    auto it = entries.find(k);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& k) -> const std::string& {
    if (auto* v = get(k)) return *v;
    throw ConfigError("missing required key '" + k + "'");
  };

  const int version = parse_int<int>("schema_version", require("schema_version"));
  if (version != RunConfig::kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(version));

  RunConfig c;
  c.d_m = parse_double("geometry.d_m", require("geometry.d_m"));
  c.D_m = parse_double("geometry.D_m", require("geometry.D_m"));
  c.k_per_m = parse_double("geometry.k_per_m", require("geometry.k_per_m"));
  const Geometry geom = c.geometry();

  const bool has_mu = get("source.mu");
  const int n_explicit = !!get("source.p0") + !!get("source.p1") + !!get("source.p2");
  if (has_mu && n_explicit)
    throw ConfigError("give either source.mu or source.p0/p1/p2, not both");
  if (has_mu) {
    c.mu = parse_double("source.mu", *get("source.mu"));
  } else if (n_explicit == 3) {
    c.explicit_stats = SourceStatistics{parse_double("source.p0", *get("source.p0")),
                                        parse_double("source.p1", *get("source.p1")),
                                        parse_double("source.p2", *get("source.p2"))};
  } else {
    throw ConfigError("source needs source.mu or all of source.p0, source.p1, source.p2");
  }

  if (auto* v = get("spin.mode")) c.spin_mode = parse_spin_mode(*v);
  if (auto* v = get("coulomb.enabled")) c.coulomb_enabled = parse_bool("coulomb.enabled", *v);
  if (auto* v = get("coulomb.depth")) c.coulomb_depth = parse_double("coulomb.depth", *v);
  if (auto* v = get("coulomb.sigma_k_rel"))
    c.sigma_k_rel = parse_double("coulomb.sigma_k_rel", *v);
  if (auto* v = get("coulomb.spread_samples"))
    c.spread_samples = parse_int<std::size_t>("coulomb.spread_samples", *v);

  const auto defaults = coulomb::IntegratorConfig::defaults_for(c.d_m);
  c.dt_s = defaults.dt;
  c.t_max_s = defaults.t_max;
  c.v_tol = defaults.v_tol;
  c.z_stop_m = defaults.z_stop;
  if (auto* v = get("integrator.dt_s")) c.dt_s = parse_double("integrator.dt_s", *v);
  if (auto* v = get("integrator.t_max_s")) c.t_max_s = parse_double("integrator.t_max_s", *v);
  if (auto* v = get("integrator.v_tol")) c.v_tol = parse_double("integrator.v_tol", *v);
  if (auto* v = get("integrator.z_stop_m")) c.z_stop_m = parse_double("integrator.z_stop_m", *v);

  const double z_dip = coulomb::dip_width(geom.tip_separation(), geom.wave_vector(),
                                          geom.screen_distance());
  c.x_min_m = -2.0 * z_dip;
  c.x_max_m = 2.0 * z_dip;
  c.n_points = 4001;
  if (auto* v = get("screen.x_min_m")) c.x_min_m = parse_double("screen.x_min_m", *v);
  if (auto* v = get("screen.x_max_m")) c.x_max_m = parse_double("screen.x_max_m", *v);
  if (auto* v = get("screen.n_points"))
    c.n_points = parse_int<std::size_t>("screen.n_points", *v);

  c.delta_min_rad = -2.0 * std::numbers::pi;
  c.delta_max_rad = 2.0 * std::numbers::pi;
  c.phase_points = 401;
  if (auto* v = get("phase.delta_min_rad"))
    c.delta_min_rad = parse_double("phase.delta_min_rad", *v);
  if (auto* v = get("phase.delta_max_rad"))
    c.delta_max_rad = parse_double("phase.delta_max_rad", *v);
  if (auto* v = get("phase.n_points"))
    c.phase_points = parse_int<std::size_t>("phase.n_points", *v);

  if (auto* v = get("oracle.bins")) c.oracle_bins = parse_int<int>("oracle.bins", *v);
  if (auto* v = get("oracle.statistics")) {
    if (*v == "fermion") c.oracle_statistics = fock::Statistics::fermion;
    else if (*v == "boson") c.oracle_statistics = fock::Statistics::boson;
    else throw ConfigError("oracle.statistics must be fermion or boson");
  }
  if (auto* v = get("oracle.envelope")) c.oracle_envelope = *v;

  if (auto* v = get("sweep.parameter")) c.sweep_parameter = *v;
  if (auto* v = get("sweep.values")) c.sweep_values = parse_list("sweep.values", *v);

  if (auto* v = get("seed")) c.seed = parse_int<std::uint64_t>("seed", *v);

  validate(c);
  return c;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!entries.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return config_from_entries(entries);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() != ".json") return parse_config(buf.str());

  nlohmann::ordered_json manifest;
  try {
    manifest = nlohmann::ordered_json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + path.string() + "': " + e.what());
  }
  if (!manifest.contains("config") || !manifest["config"].is_object())
    throw ConfigError("manifest '" + path.string() + "' has no config object");
  std::map<std::string, std::string> entries;
  for (const auto& [k, v] : manifest["config"].items()) {
    if (!v.is_string()) throw ConfigError("manifest config value for '" + k + "' is not a string");
    entries.emplace(k, v.get<std::string>());
  }
  return config_from_entries(entries);
}

}  // namespace hbt
