#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hbt/closed_form.hpp"
#include "hbt/physics.hpp"

namespace hbt::pattern {

/// Uniform screen coordinates for detector 2; detector 1 stays on axis.
struct ScreenGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n_points = 2;

  /// Throws std::invalid_argument unless x_min < x_max and n_points >= 2.
  void validate() const;
  double x(std::size_t i) const;
};

/// 2 pi D / (k d).
double spatial_wavelength(const Geometry& geom);

/// Inverted Gaussian with full width at half maximum z_dip:
/// 1 - depth exp(-x^2 / (2 sigma^2)), sigma = z_dip / (2 sqrt(2 ln 2)).
double dip_envelope(double x_rel, double z_dip, double depth);

struct CoulombOverlay {
  bool enabled = true;
  double depth = 1.0;
  /// 0 uses the central dip width; otherwise the envelope is averaged over
  /// this many dip widths drawn with relative momentum spread sigma_k_rel.
  std::size_t spread_samples = 0;
  double sigma_k_rel = 0.005;
  std::uint64_t seed = 0;
};

struct PatternPoint {
  double x;
  double theta;
  double delta;
  double g2_fermi;
  double envelope;
  double g2_total;
};

struct PatternMetadata {
  double z_dip = 0.0;
  double lambda_sp = 0.0;
  double fringe_count = 0.0;
  double visibility = 0.0;
  double v_cms = 0.0;
  double t_f = 0.0;
  double delta_min = 0.0;
  double delta_max = 0.0;
};

struct PatternSeries {
  std::vector<PatternPoint> points;
  PatternMetadata meta;
};

/// Fermionic correlator (normalized to prefactor 2) times the Coulomb-dip
/// envelope at every screen point. Requires p1 > 0 for the normalization.
PatternSeries compose_pattern(const Geometry& geom, const SourceStatistics& stats, SpinMode mode,
                              const ScreenGrid& grid, const CoulombOverlay& coulomb,
                              unsigned threads = 1);

/// Strict interior local maxima of g2_total with |x| < half_width.
std::size_t count_local_maxima(const PatternSeries& series, double half_width);

/// (max - min) / (max + min) of g2_total over the series.
double empirical_contrast(const PatternSeries& series);

}  // namespace hbt::pattern
