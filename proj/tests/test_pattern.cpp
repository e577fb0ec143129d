#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "hbt/closed_form.hpp"
#include "hbt/coulomb.hpp"
#include "hbt/pattern.hpp"

using namespace hbt;
using namespace hbt::pattern;

namespace {

const double pi = std::numbers::pi;

SourceStatistics sfe() { return {0.8, 0.1, 0.0}; }

}  // namespace

TEST_CASE("spatial wavelength") {
  const Geometry g(10e-9, 1.0, 1e11);
  CHECK(spatial_wavelength(g) == doctest::Approx(6.283185307179587e-3).epsilon(1e-14));
  CHECK(spatial_wavelength(Geometry(20e-9, 1.0, 1e11)) ==
        doctest::Approx(0.5 * spatial_wavelength(g)).epsilon(1e-15));
  for (double x : {0.0, 1e-3, -2e-3}) {
    const double step = screen_to_phase(g, x + spatial_wavelength(g)) - screen_to_phase(g, x);
    CHECK(std::abs(step - 2 * pi) < 2 * pi * 1e-3);
  }
}

TEST_CASE("dip envelope") {
  const double z = 0.0275;
  CHECK(dip_envelope(0.0, z, 1.0) == 0.0);
  CHECK(dip_envelope(z / 2, z, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dip_envelope(-z / 2, z, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dip_envelope(1e3 * z, z, 1.0) == 1.0);
  CHECK(dip_envelope(0.0, z, 0.3) == doctest::Approx(0.7));
  CHECK_THROWS_AS(dip_envelope(0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dip_envelope(0.0, z, 1.5), std::invalid_argument);
}

TEST_CASE("screen grid") {
  const ScreenGrid grid{-1.0, 1.0, 5};
  CHECK(grid.x(0) == -1.0);
  CHECK(grid.x(2) == 0.0);
  CHECK(grid.x(4) == 1.0);
  CHECK_THROWS_AS((ScreenGrid{1.0, -1.0, 5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ScreenGrid{-1.0, 1.0, 1}.validate()), std::invalid_argument);
}

TEST_CASE("fig 4(b) parameters resolve fringes inside the dip") {
  const Geometry g(10e-9, 1.0, 1e11);
  const auto series = compose_pattern(g, sfe(), SpinMode::polarized_equal,
                                      ScreenGrid{-0.05, 0.05, 8001}, CoulombOverlay{});
  CHECK(series.meta.fringe_count == doctest::Approx(4.3757).epsilon(1e-4));
  CHECK(series.meta.z_dip / series.meta.lambda_sp ==
        doctest::Approx(series.meta.fringe_count).epsilon(1e-12));
  const auto maxima = count_local_maxima(series, series.meta.z_dip / 2);
  CHECK(maxima >= 3);
  CHECK(maxima <= 5);
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    CHECK(p.g2_total == doctest::Approx(p.g2_fermi * p.envelope).epsilon(1e-15));
    CHECK(p.g2_total <= p.g2_fermi);
    CHECK(p.g2_total >= 0.0);
    const auto& mirror = series.points[series.points.size() - 1 - i];
    CHECK(p.g2_total == doctest::Approx(mirror.g2_total).epsilon(1e-12));
  }
}

TEST_CASE("fig 4(a) parameters merge fringe and dip") {
  const Geometry g(1e-11, 1.0, 1e11);
  const auto series = compose_pattern(g, sfe(), SpinMode::polarized_equal,
                                      ScreenGrid{-1.5, 1.5, 6001}, CoulombOverlay{});
  CHECK(series.meta.fringe_count == doctest::Approx(0.138372).epsilon(1e-5));
  CHECK(count_local_maxima(series, series.meta.z_dip / 2) == 0);
}

TEST_CASE("without Coulomb the closed-form curve is reproduced") {
  const Geometry g(10e-9, 1.0, 1e11);
  CoulombOverlay off;
  off.enabled = false;
  const auto series =
      compose_pattern(g, sfe(), SpinMode::polarized_equal, ScreenGrid{-0.02, 0.02, 401}, off);
  const auto env = EnvelopeWeights::normalized_for(sfe());
  for (const auto& p : series.points) {
    CHECK(p.envelope == 1.0);
    CHECK(p.g2_total == g2_total(p.delta, sfe(), env, SpinMode::polarized_equal));
  }
  CHECK(series.points[200].x == 0.0);
  CHECK(series.points[200].g2_total == 0.0);

  // Grid ending exactly at delta = pi recovers the visibility.
  const double x_pi = g.screen_distance() * std::tan(std::asin(pi / 1000.0));
  for (const auto& stats : {sfe(), poissonian_stats(0.2), SourceStatistics{0.6, 0.1, 0.04}}) {
    for (auto mode : {SpinMode::polarized_equal, SpinMode::unpolarized}) {
      const auto s = compose_pattern(g, stats, mode, ScreenGrid{-x_pi, x_pi, 201}, off);
      CHECK(std::abs(empirical_contrast(s) - visibility(stats, mode)) < 1e-9);
    }
  }
}

TEST_CASE("spread-averaged envelope") {
  const Geometry g(10e-9, 1.0, 1e11);
  CoulombOverlay spread;
  spread.spread_samples = 400;
  spread.seed = 7;
  const ScreenGrid grid{-0.05, 0.05, 501};
  const auto a = compose_pattern(g, sfe(), SpinMode::polarized_equal, grid, spread, 1);
  const auto b = compose_pattern(g, sfe(), SpinMode::polarized_equal, grid, spread, 6);
  const auto central = compose_pattern(g, sfe(), SpinMode::polarized_equal, grid, CoulombOverlay{});
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].envelope == b.points[i].envelope);
    CHECK(a.points[i].envelope == doctest::Approx(central.points[i].envelope).epsilon(2e-2));
  }
}

TEST_CASE("compose requires a normalizable prefactor") {
  const Geometry g(10e-9, 1.0, 1e11);
  CHECK_THROWS_AS(compose_pattern(g, SourceStatistics{1.0, 0.0, 0.0}, SpinMode::polarized_equal,
                                  ScreenGrid{-0.01, 0.01, 11}, CoulombOverlay{}),
                  std::domain_error);
}
