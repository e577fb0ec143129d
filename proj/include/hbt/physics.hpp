#pragma once

#include <numbers>

namespace hbt {

/// CODATA 2018 values, SI units. Compiled in so that every run uses the same numbers.
struct PhysicalConstants {
  static constexpr double e = 1.602176634e-19;       // C (exact)
  static constexpr double eps0 = 8.8541878128e-12;   // F/m
  static constexpr double hbar = 1.054571817e-34;    // J s
  static constexpr double h = 2.0 * std::numbers::pi * hbar;
  static constexpr double m_e = 9.1093837015e-31;    // kg
  static constexpr double c = 299792458.0;           // m/s (exact)

  /// e^2 / (4 pi eps0), the Coulomb coupling in N m^2.
  static constexpr double coulomb_coupling() {
    return e * e / (4.0 * std::numbers::pi * eps0);
  }
};

/// Two-tip far-field setup. The wave vector is the canonical spectral
/// parameter; the de Broglie wavelength is always derived from it.
class Geometry {
public:
  /// Minimum screen-distance / tip-separation ratio accepted as far field.
  static constexpr double kMinFarFieldRatio = 1e4;
  /// Centre-of-mass speed must stay below this fraction of c.
  static constexpr double kMaxBeta = 0.1;

  /// Throws std::invalid_argument on non-positive inputs, D/d < 1e4, or
  /// hbar k / m_e >= 0.1 c.
  Geometry(double tip_separation_m, double screen_distance_m, double wave_vector_per_m);

  double tip_separation() const { return d_; }
  double screen_distance() const { return D_; }
  double wave_vector() const { return k_; }
  double wavelength() const { return 2.0 * std::numbers::pi / k_; }

  /// hbar k / m_e.
  double center_of_mass_speed() const;
  /// D / v_cms.
  double time_of_flight() const;
  /// Screen period 2 pi D / (k d) of the two-source fringes.
  double spatial_wavelength() const;

private:
  double d_;
  double D_;
  double k_;
};

/// A detector direction, carried both as polar angle and screen coordinate.
class DetectorPosition {
public:
  static DetectorPosition from_screen(const Geometry& geom, double x_m);
  /// Throws std::invalid_argument unless |theta| < pi/2.
  static DetectorPosition from_angle(const Geometry& geom, double theta_rad);

  double theta() const { return theta_; }
  double x() const { return x_; }
  /// sin(theta), computed as x / sqrt(x^2 + D^2) when built from a screen coordinate.
  double sin_theta() const { return sin_theta_; }

private:
  DetectorPosition(double theta, double x, double sin_theta)
      : theta_(theta), x_(x), sin_theta_(sin_theta) {}
  double theta_;
  double x_;
  double sin_theta_;
};

/// Two-source path phase k d sin(theta) at a detector; the on-axis detector has zero phase.
double phase_delta(const Geometry& geom, const DetectorPosition& det);

/// Phase of a detector at screen coordinate x, using the exact sin(theta) = x / sqrt(x^2 + D^2).
double screen_to_phase(const Geometry& geom, double x_m);

}  // namespace hbt
