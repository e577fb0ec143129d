#include "hbt/physics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hbt {

Geometry::Geometry(double tip_separation_m, double screen_distance_m, double wave_vector_per_m)
    : d_(tip_separation_m), D_(screen_distance_m), k_(wave_vector_per_m) {
  if (!(d_ > 0.0) || !std::isfinite(d_)) {
    throw std::invalid_argument("tip separation must be positive and finite");
  }
  if (!(D_ > 0.0) || !std::isfinite(D_)) {
    throw std::invalid_argument("screen distance must be positive and finite");
  }
  if (!(k_ > 0.0) || !std::isfinite(k_)) {
    throw std::invalid_argument("wave vector must be positive and finite");
  }
  if (D_ / d_ < kMinFarFieldRatio) {
    throw std::invalid_argument("far-field condition violated: D/d = " + std::to_string(D_ / d_) +
                                " < 1e4");
  }
  if (center_of_mass_speed() >= kMaxBeta * PhysicalConstants::c) {
    throw std::invalid_argument("wave vector outside the non-relativistic regime (v_cms >= 0.1 c)");
  }
}

double Geometry::center_of_mass_speed() const {
  return PhysicalConstants::hbar * k_ / PhysicalConstants::m_e;
}

double Geometry::time_of_flight() const { return D_ / center_of_mass_speed(); }

double Geometry::spatial_wavelength() const { return 2.0 * std::numbers::pi * D_ / (k_ * d_); }

DetectorPosition DetectorPosition::from_screen(const Geometry& geom, double x_m) {
  if (!std::isfinite(x_m)) {
    throw std::invalid_argument("screen coordinate must be finite");
  }
  const double D = geom.screen_distance();
  const double s = x_m / std::hypot(x_m, D);
  return DetectorPosition(std::atan2(x_m, D), x_m, s);
}

DetectorPosition DetectorPosition::from_angle(const Geometry& geom, double theta_rad) {
  if (!(std::abs(theta_rad) < std::numbers::pi / 2)) {
    throw std::invalid_argument("detector angle must satisfy |theta| < pi/2");
  }
  return DetectorPosition(theta_rad, geom.screen_distance() * std::tan(theta_rad),
                          std::sin(theta_rad));
}

double phase_delta(const Geometry& geom, const DetectorPosition& det) {
  return geom.wave_vector() * geom.tip_separation() * det.sin_theta();
}

double screen_to_phase(const Geometry& geom, double x_m) {
  return phase_delta(geom, DetectorPosition::from_screen(geom, x_m));
}

}  // namespace hbt
