#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Semiclassical Coulomb repulsion of two electrons leaving neighbouring tips
// with parallel momenta. The relative coordinate z obeys
//
//   mu z'' = e^2 / (4 pi eps0 z^2),   mu = m_e / 2,
//
// i.e. z'' = e^2 / (2 pi eps0 m_e z^2). Starting at rest from z = d, energy
// conservation gives the asymptotic relative speed
//
//   v_end = sqrt(e^2 / (pi eps0 m_e d)),
//
// and the separation on the screen after the time of flight t_f = D m_e / (hbar k)
// is z_dip = v_end t_f. Dividing by the fringe period 2 pi D / (k d) gives the
// fringe count N = sqrt(e^2 m_e / (pi eps0 h^2)) sqrt(d), independent of k and D.
// Using the full electron mass instead of mu in the relative equation would
// change v_end by sqrt(2) and break both closed forms.

namespace hbt::coulomb {

using Vec3 = std::array<double, 3>;

/// Force on electron 1 from electron 2. Throws std::domain_error for coincident positions.
Vec3 coulomb_force(const Vec3& r1, const Vec3& r2);

/// e^2 / (2 pi eps0 m_e): the relative acceleration is this over z^2.
double relative_coupling();

struct IntegratorConfig {
  double dt = 0.0;            // s
  double t_max = 0.0;         // s, hard cap
  double v_tol = 1e-6;        // relative change of z' over one window
  double z_stop = 0.0;        // m, separation cutoff
  std::size_t window = 1000;  // steps
  double min_travel = 100.0;  // no convergence before z > min_travel * d0
  std::size_t record_stride = 1000;

  /// dt = d0 / (1e4 v_end), z_stop = 1e4 d0, t_max = 10 z_stop / v_end.
  static IntegratorConfig defaults_for(double d0);
  /// Throws std::invalid_argument on dt <= 0, v_tol outside (0, 1), z_stop <= d0,
  /// t_max <= 0, or a zero window/stride.
  void validate(double d0) const;
};

struct TrajectorySample {
  double t;
  double z;
  double z_dot;
  double energy_drift;  // |E(t) - E(0)| / E(0)
};

struct Trajectory {
  double d0 = 0.0;
  std::vector<TrajectorySample> samples;  // every record_stride-th step plus the last
  std::size_t steps = 0;
  double max_energy_drift = 0.0;          // over every step, not only recorded ones
  double final_z_dot = 0.0;
  /// Asymptotic speed from the final state, sqrt(z'^2 + 2 K / z), which removes
  /// the slowly decaying Coulomb tail left at finite separation.
  double v_asymptotic = 0.0;
  /// First time z' reaches 99% of its asymptote (linearly interpolated).
  double t_99 = 0.0;
  bool converged = false;
};

class NonConvergence : public std::runtime_error {
public:
  NonConvergence(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

private:
  Trajectory partial_;
};

/// Velocity-Verlet integration of the relative equation from rest at z = d0.
/// Stops once z' changed by less than v_tol over the trailing window with
/// z > min_travel d0, or when z passes z_stop. Throws NonConvergence (carrying
/// the trajectory so far) if t_max is reached first.
Trajectory integrate_relative(double d0, const IntegratorConfig& cfg);

/// sqrt(e^2 / (pi eps0 m_e d0)). Throws std::invalid_argument for d0 <= 0.
double end_velocity_closed_form(double d0);

/// z_dip = v_end(d) * D m_e / (hbar k). Throws std::invalid_argument for non-positive input.
double dip_width(double d, double k, double D);

struct DipResult {
  double v_rel_end = 0.0;  // m/s
  double t_f = 0.0;        // s
  double v_cms = 0.0;      // m/s
  double z_dip = 0.0;      // m
  double t_99 = 0.0;       // s
  double max_energy_drift = 0.0;
};

/// dip width from the integrated asymptotic speed. Propagates NonConvergence.
DipResult dip_width_numeric(double d, double k, double D, const IntegratorConfig& cfg);

/// sqrt(e^2 m_e / (pi eps0 h^2)) sqrt(d). Throws std::invalid_argument for d <= 0.
double fringe_count(double d);

/// Draws k_i ~ Normal(k0, sigma_k_rel k0) (redrawing non-positive values) and
/// maps each through dip_width. Sample i uses its own generator seeded from
/// (seed, i), so results do not depend on `threads`.
/// Throws std::invalid_argument unless 0 < sigma_k_rel < 0.2 and n >= 100.
std::vector<double> sample_dip_widths(double d, double k0, double sigma_k_rel, double D,
                                      std::size_t n, std::uint64_t seed, unsigned threads = 1);

/// Normal deviate stream used by sample_dip_widths for sample `index`.
double sample_wave_vector(double k0, double sigma_k_rel, std::uint64_t seed, std::uint64_t index);

}  // namespace hbt::coulomb
