#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "hbt/config.hpp"
#include "hbt/output.hpp"

using namespace hbt;

namespace {

const std::string base =
    "schema_version = 1\n"
    "geometry.d_m = 10e-9\n"
    "geometry.D_m = 1\n"
    "geometry.k_per_m = 1e11\n";

std::string with(const std::string& extra) { return base + extra; }

}  // namespace

TEST_CASE("minimal config resolves defaults") {
  const auto c = parse_config(with("source.mu = 0.2\n"));
  CHECK(c.mu.has_value());
  CHECK(c.statistics().p1 == doctest::Approx(0.0818730753077982).epsilon(1e-14));
  CHECK(c.spin_mode == SpinMode::unpolarized);
  CHECK(c.coulomb_enabled);
  CHECK(c.coulomb_depth == 1.0);
  CHECK(c.sigma_k_rel == 0.005);
  CHECK(c.n_points == 4001);
  CHECK(c.x_max_m == doctest::Approx(2 * 0.027493461964114264));
  CHECK(c.phase_points == 401);
  CHECK(c.oracle_bins == 9);
  CHECK(c.seed == 0);
  const auto defaults = coulomb::IntegratorConfig::defaults_for(10e-9);
  CHECK(c.dt_s == defaults.dt);
  CHECK(c.z_stop_m == defaults.z_stop);
}

TEST_CASE("comments, spacing and every key") {
  const auto c = parse_config(
      "# header\n"
      "schema_version=1   # trailing\n"
      "  geometry.d_m   =   2e-9\n"
      "geometry.D_m = 0.5\n"
      "geometry.k_per_m = 5e10\n"
      "\n"
      "source.p0 = 0.7\nsource.p1 = 0.1\nsource.p2 = 0.02\n"
      "spin.mode = orthogonal_only\n"
      "coulomb.enabled = false\ncoulomb.depth = 0.5\ncoulomb.sigma_k_rel = 0.01\n"
      "coulomb.spread_samples = 200\n"
      "integrator.dt_s = 1e-19\nintegrator.t_max_s = 1e-9\nintegrator.v_tol = 1e-7\n"
      "integrator.z_stop_m = 1e-5\n"
      "screen.x_min_m = -0.1\nscreen.x_max_m = 0.2\nscreen.n_points = 11\n"
      "phase.delta_min_rad = 0\nphase.delta_max_rad = 3\nphase.n_points = 7\n"
      "oracle.bins = 5\noracle.statistics = boson\noracle.envelope = gaussian\n"
      "sweep.parameter = k\nsweep.values = 1e10, 2e10,4e10\n"
      "seed = 18446744073709551615\n");
  CHECK(c.d_m == 2e-9);
  CHECK(c.explicit_stats->p2 == 0.02);
  CHECK(c.spin_mode == SpinMode::orthogonal_only);
  CHECK_FALSE(c.coulomb_enabled);
  CHECK(c.spread_samples == 200);
  CHECK(c.integrator().dt == 1e-19);
  CHECK(c.integrator().v_tol == 1e-7);
  CHECK(c.screen().n_points == 11);
  CHECK(c.oracle_statistics == fock::Statistics::boson);
  CHECK(c.sweep_values == std::vector<double>{1e10, 2e10, 4e10});
  CHECK(c.seed == 18446744073709551615ull);
  CHECK(c.overlay().seed == c.seed);
}

TEST_CASE("round trip is idempotent") {
  for (const auto& text :
       {with("source.mu = 0.2\n"),
        with("source.p0 = 0.8\nsource.p1 = 0.1\nsource.p2 = 0\nspin.mode = polarized_equal\n"
             "sweep.parameter = d\nsweep.values = 1e-9, 3.3e-9\nseed = 7\n"),
        with("source.mu = 0.123456789012345678\ncoulomb.depth = 0.3333333333333333\n")}) {
    const auto a = parse_config(text);
    const std::string s1 = a.serialize();
    const auto b = parse_config(s1);
    const std::string s2 = b.serialize();
    CHECK(s1 == s2);
    CHECK(a.entries() == b.entries());
    CHECK(a.statistics().p1 == b.statistics().p1);
  }
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nsource.muu = 1\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nsource.mu = 0.3\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nsource.p0 = 1\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.p0 = 0.9\nsource.p1 = 0.05\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nseed = -1\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2 m\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\ncoulomb.enabled = yes\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nnot a pair\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\ngeometry.d_m =\n")), ConfigError);
  CHECK_THROWS_AS(parse_config("geometry.d_m = 1e-8\ngeometry.D_m = 1\ngeometry.k_per_m = 1e11\n"
                               "source.mu = 0.2\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("schema_version = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nsweep.values = 1, 2\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nsweep.parameter = x\n")), ConfigError);
}

TEST_CASE("module invariants are re-validated on load") {
  CHECK_THROWS_AS(parse_config(with("source.p0 = 0.9\nsource.p1 = 0.1\nsource.p2 = 0.1\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(with("source.mu = -1\n")), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("schema_version = 1\ngeometry.d_m = 1e-3\ngeometry.D_m = 1\n"
                               "geometry.k_per_m = 1e11\nsource.mu = 0.2\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config("schema_version = 1\ngeometry.d_m = 1e-8\ngeometry.D_m = 1\n"
                               "geometry.k_per_m = 1e13\nsource.mu = 0.2\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nspin.mode = sideways\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\ncoulomb.depth = 1.5\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\ncoulomb.sigma_k_rel = 0.3\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\ncoulomb.spread_samples = 10\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nintegrator.dt_s = 0\n")), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nscreen.n_points = 1\n")), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\nscreen.x_min_m = 1\nscreen.x_max_m = 0\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(with("source.mu = 0.2\noracle.bins = 4\n")), ConfigError);
}

TEST_CASE("load from file and from a manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "hbt_test_config";
  std::filesystem::create_directories(dir);
  const auto cfg_path = dir / "run.cfg";
  {
    std::ofstream(cfg_path) << with("source.mu = 0.2\nseed = 99\n");
  }
  const auto a = load_config(cfg_path);
  CHECK(a.seed == 99);

  const auto manifest = output::make_manifest("compose", a, "fixed");
  output::write_json(dir / "run.manifest.json", manifest);
  const auto b = load_config(dir / "run.manifest.json");
  CHECK(a.serialize() == b.serialize());

  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
  {
    std::ofstream(dir / "broken.json") << "{\"config\": 3}";
  }
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(output::format_scientific(0.1) == "1.0000000000000001e-01");
  CHECK(output::format_scientific(-2.5e-300) == "-2.5000000000000000e-300");
  output::CsvTable t({"a", "b"});
  t.add_row({1.0, 2.0});
  CHECK(t.str() == "a,b\n1.0000000000000000e+00,2.0000000000000000e+00\n");
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
}
