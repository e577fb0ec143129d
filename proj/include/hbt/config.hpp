#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbt/closed_form.hpp"
#include "hbt/coulomb.hpp"
#include "hbt/fock_engine.hpp"
#include "hbt/pattern.hpp"
#include "hbt/physics.hpp"

// Run configuration: one `key = value` pair per line, `#` starts a comment.
// Keys are dotted (`geometry.d_m`). Unknown or repeated keys are errors.
//
//   schema_version          1 (required)
//   geometry.d_m            tip separation [m] (required)
//   geometry.D_m            screen distance [m] (required)
//   geometry.k_per_m        wave vector [1/m] (required)
//   source.mu               Poisson mean, or all three of
//   source.p0/p1/p2         explicit per-branch probabilities
//   spin.mode               polarized_equal | unpolarized | orthogonal_only
//   coulomb.enabled         true | false
//   coulomb.depth           dip depth in [0, 1]
//   coulomb.sigma_k_rel     relative momentum spread
//   coulomb.spread_samples  0 = central dip width, else Monte Carlo average
//   integrator.dt_s, integrator.t_max_s, integrator.v_tol, integrator.z_stop_m
//   screen.x_min_m, screen.x_max_m, screen.n_points
//   phase.delta_min_rad, phase.delta_max_rad, phase.n_points
//   oracle.bins, oracle.statistics (fermion | boson), oracle.envelope (flat | gaussian)
//   sweep.parameter         d | k | D | mu
//   sweep.values            comma-separated list
//   seed                    unsigned 64-bit
//
// Omitted optional keys are resolved to defaults on load, so the serialized
// form of a loaded configuration is complete and reloads to the same values.

namespace hbt {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  static constexpr int kSchemaVersion = 1;

  double d_m = 0.0;
  double D_m = 0.0;
  double k_per_m = 0.0;

  std::optional<double> mu;
  std::optional<SourceStatistics> explicit_stats;

  SpinMode spin_mode = SpinMode::unpolarized;

  bool coulomb_enabled = true;
  double coulomb_depth = 1.0;
  double sigma_k_rel = 0.005;
  std::size_t spread_samples = 0;

  double dt_s = 0.0;
  double t_max_s = 0.0;
  double v_tol = 1e-6;
  double z_stop_m = 0.0;

  double x_min_m = 0.0;
  double x_max_m = 0.0;
  std::size_t n_points = 0;

  double delta_min_rad = 0.0;
  double delta_max_rad = 0.0;
  std::size_t phase_points = 0;

  int oracle_bins = 9;
  fock::Statistics oracle_statistics = fock::Statistics::fermion;
  std::string oracle_envelope = "flat";

  std::optional<std::string> sweep_parameter;
  std::vector<double> sweep_values;

  std::uint64_t seed = 0;

  Geometry geometry() const { return Geometry(d_m, D_m, k_per_m); }
  SourceStatistics statistics() const;
  coulomb::IntegratorConfig integrator() const;
  pattern::ScreenGrid screen() const { return {x_min_m, x_max_m, n_points}; }
  pattern::CoulombOverlay overlay() const;

  /// Ordered (key, value) pairs of the resolved configuration.
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::string serialize() const;
};

/// Parses key-value text, resolves defaults, and re-validates every module
/// invariant. Throws ConfigError (or the module's std::invalid_argument).
RunConfig parse_config(const std::string& text);

/// Reads a key-value file, or the "config" object of a JSON run manifest.
RunConfig load_config(const std::filesystem::path& path);

/// Builds a configuration from already-split pairs (shared by both loaders).
RunConfig config_from_entries(const std::map<std::string, std::string>& entries);

std::string format_double(double value);

}  // namespace hbt
