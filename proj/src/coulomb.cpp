#include "hbt/coulomb.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "hbt/parallel.hpp"
#include "hbt/physics.hpp"

namespace hbt::coulomb {

using PC = PhysicalConstants;

Vec3 coulomb_force(const Vec3& r1, const Vec3& r2) {
  const Vec3 diff{r1[0] - r2[0], r1[1] - r2[1], r1[2] - r2[2]};
  const double dist = std::sqrt(diff[0] * diff[0] + diff[1] * diff[1] + diff[2] * diff[2]);
  if (dist == 0.0) throw std::domain_error("coulomb_force: coincident positions");
  const double scale = PC::coulomb_coupling() / (dist * dist * dist);
  return {scale * diff[0], scale * diff[1], scale * diff[2]};
}

double relative_coupling() {
  return PC::e * PC::e / (2.0 * std::numbers::pi * PC::eps0 * PC::m_e);
}

double end_velocity_closed_form(double d0) {
  if (!(d0 > 0.0)) throw std::invalid_argument("initial separation must be positive");
  return std::sqrt(PC::e * PC::e / (std::numbers::pi * PC::eps0 * PC::m_e * d0));
}

IntegratorConfig IntegratorConfig::defaults_for(double d0) {
  const double v = end_velocity_closed_form(d0);
  IntegratorConfig cfg;
  cfg.dt = d0 / (1e4 * v);
  cfg.z_stop = 1e4 * d0;
  cfg.t_max = 10.0 * cfg.z_stop / v;
  return cfg;
}

void IntegratorConfig::validate(double d0) const {
  if (!(d0 > 0.0)) throw std::invalid_argument("initial separation must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("integrator dt must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("integrator t_max must be positive");
  if (!(v_tol > 0.0 && v_tol < 1.0)) throw std::invalid_argument("v_tol must lie in (0, 1)");
  if (!(z_stop > d0)) throw std::invalid_argument("z_stop must exceed the initial separation");
  if (window == 0) throw std::invalid_argument("convergence window must be positive");
  if (record_stride == 0) throw std::invalid_argument("record stride must be positive");
}

Trajectory integrate_relative(double d0, const IntegratorConfig& cfg) {
  cfg.validate(d0);
  const double K = relative_coupling();
  const double energy0 = K / d0;  // per unit reduced mass, starting at rest

  Trajectory traj;
  traj.d0 = d0;

  double z = d0;
  double v = 0.0;
  double a = K / (z * z);
  double v_checkpoint = 0.0;
  double prev_ratio = 0.0;
  double prev_t = 0.0;
  bool reached_99 = false;
  std::size_t step = 0;

  auto record = [&](double t, double drift) { traj.samples.push_back({t, z, v, drift}); };
  record(0.0, 0.0);

  while (true) {
    ++step;
    const double t = static_cast<double>(step) * cfg.dt;
    v += 0.5 * cfg.dt * a;
    z += cfg.dt * v;
    a = K / (z * z);
    v += 0.5 * cfg.dt * a;

    const double energy = 0.5 * v * v + K / z;
    const double drift = std::abs(energy - energy0) / energy0;
    traj.max_energy_drift = std::max(traj.max_energy_drift, drift);

    if (!reached_99) {
      const double ratio = v / std::sqrt(v * v + 2.0 * K / z);
      if (ratio >= 0.99) {
        const double frac = (0.99 - prev_ratio) / (ratio - prev_ratio);
        traj.t_99 = prev_t + frac * (t - prev_t);
        reached_99 = true;
      }
      prev_ratio = ratio;
      prev_t = t;
    }

    bool done = false;
    if (step % cfg.window == 0) {
      const double change = std::abs(v - v_checkpoint) / v;
      if (change < cfg.v_tol && z > cfg.min_travel * d0) done = true;
      v_checkpoint = v;
    }
    if (z > cfg.z_stop) done = true;

    if (done || step % cfg.record_stride == 0) record(t, drift);
    if (done) {
      traj.converged = true;
      break;
    }
    if (t >= cfg.t_max) {
      record(t, drift);
      traj.steps = step;
      traj.final_z_dot = v;
      traj.v_asymptotic = std::sqrt(v * v + 2.0 * K / z);
      char msg[96];
      std::snprintf(msg, sizeof msg, "relative-motion integration did not converge within t_max = %g s",
                    cfg.t_max);
      throw NonConvergence(msg, std::move(traj));
    }
  }
  traj.steps = step;
  traj.final_z_dot = v;
  traj.v_asymptotic = std::sqrt(v * v + 2.0 * K / z);
  return traj;
}

namespace {

double time_of_flight(double k, double D) { return D * PC::m_e / (PC::hbar * k); }

}  // namespace

double dip_width(double d, double k, double D) {
  if (!(d > 0.0) || !(k > 0.0) || !(D > 0.0)) {
    throw std::invalid_argument("dip_width requires positive d, k, D");
  }
  return end_velocity_closed_form(d) * time_of_flight(k, D);
}

DipResult dip_width_numeric(double d, double k, double D, const IntegratorConfig& cfg) {
  if (!(k > 0.0) || !(D > 0.0)) throw std::invalid_argument("dip width requires positive k, D");
  const Trajectory traj = integrate_relative(d, cfg);
  DipResult out;
  out.v_rel_end = traj.v_asymptotic;
  out.t_f = time_of_flight(k, D);
  out.v_cms = PC::hbar * k / PC::m_e;
  out.z_dip = out.v_rel_end * out.t_f;
  out.t_99 = traj.t_99;
  out.max_energy_drift = traj.max_energy_drift;
  return out;
}

double fringe_count(double d) {
  if (!(d > 0.0)) throw std::invalid_argument("tip separation must be positive");
  return std::sqrt(PC::e * PC::e * PC::m_e / (std::numbers::pi * PC::eps0 * PC::h * PC::h)) *
         std::sqrt(d);
}

double sample_wave_vector(double k0, double sigma_k_rel, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(k0, sigma_k_rel * k0);
  double k = normal(rng);
  while (!(k > 0.0)) k = normal(rng);
  return k;
}

std::vector<double> sample_dip_widths(double d, double k0, double sigma_k_rel, double D,
                                      std::size_t n, std::uint64_t seed, unsigned threads) {
  if (!(sigma_k_rel > 0.0 && sigma_k_rel < 0.2)) {
    throw std::invalid_argument("sigma_k_rel must lie in (0, 0.2)");
  }
  if (n < 100) throw std::invalid_argument("at least 100 samples are required");
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    out[i] = dip_width(d, sample_wave_vector(k0, sigma_k_rel, seed, i), D);
  });
  return out;
}

}  // namespace hbt::coulomb
