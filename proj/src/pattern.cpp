#include "hbt/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hbt/coulomb.hpp"
#include "hbt/parallel.hpp"

namespace hbt::pattern {

void ScreenGrid::validate() const {
  if (!(x_min < x_max)) throw std::invalid_argument("screen grid needs x_min < x_max");
  if (n_points < 2) throw std::invalid_argument("screen grid needs at least 2 points");
  if (!std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw std::invalid_argument("screen grid bounds must be finite");
  }
}

double ScreenGrid::x(std::size_t i) const {
  if (i + 1 == n_points) return x_max;
  return x_min + static_cast<double>(i) * (x_max - x_min) / static_cast<double>(n_points - 1);
}

double spatial_wavelength(const Geometry& geom) { return geom.spatial_wavelength(); }

double dip_envelope(double x_rel, double z_dip, double depth) {
  if (!(z_dip > 0.0)) throw std::invalid_argument("dip width must be positive");
  if (!(depth >= 0.0 && depth <= 1.0)) throw std::invalid_argument("dip depth must lie in [0, 1]");
  const double sigma = z_dip / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  return 1.0 - depth * std::exp(-x_rel * x_rel / (2.0 * sigma * sigma));
}

PatternSeries compose_pattern(const Geometry& geom, const SourceStatistics& stats, SpinMode mode,
                              const ScreenGrid& grid, const CoulombOverlay& coulomb,
                              unsigned threads) {
  stats.validate();
  grid.validate();
  const EnvelopeWeights env = EnvelopeWeights::normalized_for(stats);

  PatternSeries series;
  auto& meta = series.meta;
  meta.lambda_sp = spatial_wavelength(geom);
  meta.z_dip = coulomb::dip_width(geom.tip_separation(), geom.wave_vector(),
                                  geom.screen_distance());
  meta.fringe_count = coulomb::fringe_count(geom.tip_separation());
  meta.visibility = visibility(stats, mode);
  meta.v_cms = geom.center_of_mass_speed();
  meta.t_f = geom.time_of_flight();

  std::vector<double> widths;
  if (coulomb.enabled && coulomb.spread_samples > 0) {
    widths = coulomb::sample_dip_widths(geom.tip_separation(), geom.wave_vector(),
                                        coulomb.sigma_k_rel, geom.screen_distance(),
                                        coulomb.spread_samples, coulomb.seed, threads);
  }

  series.points.resize(grid.n_points);
  parallel_for(grid.n_points, threads, [&](std::size_t i) {
    const double x = grid.x(i);
    const auto det = DetectorPosition::from_screen(geom, x);
    const double delta = phase_delta(geom, det);
    const double fermi = g2_total(delta, stats, env, mode);
    double envelope = 1.0;
    if (coulomb.enabled) {
      if (widths.empty()) {
        envelope = dip_envelope(x, meta.z_dip, coulomb.depth);
      } else {
        double sum = 0.0;
        for (double w : widths) sum += dip_envelope(x, w, coulomb.depth);
        envelope = sum / static_cast<double>(widths.size());
      }
    }
    series.points[i] = {x, det.theta(), delta, fermi, envelope, fermi * envelope};
  });

  const auto [lo, hi] = std::minmax_element(
      series.points.begin(), series.points.end(),
      [](const PatternPoint& a, const PatternPoint& b) { return a.delta < b.delta; });
  meta.delta_min = lo->delta;
  meta.delta_max = hi->delta;
  return series;
}

std::size_t count_local_maxima(const PatternSeries& series, double half_width) {
  const auto& p = series.points;
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (std::abs(p[i].x) >= half_width) continue;
    if (p[i].g2_total > p[i - 1].g2_total && p[i].g2_total > p[i + 1].g2_total) ++count;
  }
  return count;
}

double empirical_contrast(const PatternSeries& series) {
  if (series.points.empty()) throw std::invalid_argument("empty pattern series");
  const auto [lo, hi] = std::minmax_element(
      series.points.begin(), series.points.end(),
      [](const PatternPoint& a, const PatternPoint& b) { return a.g2_total < b.g2_total; });
  const double sum = hi->g2_total + lo->g2_total;
  return sum == 0.0 ? 0.0 : (hi->g2_total - lo->g2_total) / sum;
}

}  // namespace hbt::pattern
