#include "hbt/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "hbt/closed_form.hpp"
#include "hbt/coulomb.hpp"
#include "hbt/fock_engine.hpp"
#include "hbt/output.hpp"
#include "hbt/parallel.hpp"
#include "hbt/pattern.hpp"

namespace hbt::cli {

namespace {

using nlohmann::ordered_json;

std::string stamp(const RunOptions& opt) {
  return opt.timestamp.empty() ? output::utc_timestamp() : opt.timestamp;
}

void require_out(const RunOptions& opt) {
  if (opt.out.empty()) throw std::invalid_argument("an output path (--out) is required");
}

ordered_json optional_visibility(const SourceStatistics& stats, SpinMode mode) {
  try {
    return visibility(stats, mode);
  } catch (const std::domain_error&) {
    return nullptr;
  }
}

ordered_json derived_block(const RunConfig& cfg, double delta_min, double delta_max) {
  const Geometry g = cfg.geometry();
  ordered_json d;
  d["delta_min_rad"] = delta_min;
  d["delta_max_rad"] = delta_max;
  d["lambda_sp_m"] = g.spatial_wavelength();
  d["z_dip_m"] = coulomb::dip_width(g.tip_separation(), g.wave_vector(), g.screen_distance());
  d["fringe_count"] = coulomb::fringe_count(g.tip_separation());
  d["visibility"] = optional_visibility(cfg.statistics(), cfg.spin_mode);
  d["v_cms_m_per_s"] = g.center_of_mass_speed();
  d["t_f_s"] = g.time_of_flight();
  return d;
}

std::vector<double> phase_grid(const RunConfig& cfg) {
  std::vector<double> out(cfg.phase_points);
  const double step = (cfg.delta_max_rad - cfg.delta_min_rad) / double(cfg.phase_points - 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = cfg.delta_min_rad + double(i) * step;
  out.back() = cfg.delta_max_rad;
  return out;
}

void finish(CommandResult& result, ordered_json& manifest, const std::filesystem::path& stem) {
  const auto path = output::with_suffix(stem, ".manifest.json");
  for (const auto& f : result.files) manifest["outputs"].push_back(f.filename().string());
  output::write_json(path, manifest);
  result.files.push_back(path);
}

/// Boson correlator for one emitter per source (no pair branches).
double boson_single_emitters(double delta, const SourceStatistics& s, const EnvelopeWeights& env,
                             SpinMode mode) {
  const double base = 4.0 * s.p1 * s.p1 * env.c1sq * env.c2sq;
  switch (mode) {
    case SpinMode::polarized_equal: return base * (1.0 + std::cos(delta));
    case SpinMode::unpolarized: return base * (2.0 + std::cos(delta));
    case SpinMode::orthogonal_only: return base;
  }
  return 0.0;
}

}  // namespace

CommandResult cmd_closed_form(const RunConfig& cfg, const RunOptions& opt) {
  require_out(opt);
  const SourceStatistics stats = cfg.statistics();
  const SourceStatistics single{stats.p0, stats.p1, 0.0};
  const auto env = EnvelopeWeights::normalized_for(stats);
  const auto env_single = EnvelopeWeights::normalized_for(single);

  const auto deltas = phase_grid(cfg);
  std::vector<std::vector<double>> rows(deltas.size());
  parallel_for(deltas.size(), opt.threads, [&](std::size_t i) {
    const double d = deltas[i];
    rows[i] = {d, g2_total(d, stats, env, SpinMode::polarized_equal),
               g2_total(d, single, env_single, SpinMode::unpolarized),
               g2_total(d, stats, env, SpinMode::unpolarized), g2_bosonic_reference(d, 2.0)};
  });

  output::CsvTable csv({"delta_rad", "g2_fermi_polarized", "g2_fermi_unpolarized_sfe",
                        "g2_fermi_unpolarized_mfe", "g2_boson_reference"});
  for (const auto& r : rows) csv.add_row(r);

  CommandResult result;
  const auto csv_path = output::with_suffix(opt.out, ".csv");
  csv.save(csv_path);
  result.files.push_back(csv_path);

  auto manifest = output::make_manifest("closed-form", cfg, stamp(opt));
  manifest["derived"] = derived_block(cfg, deltas.front(), deltas.back());
  manifest["derived"]["visibility_polarized"] = visibility(stats, SpinMode::polarized_equal);
  manifest["derived"]["visibility_unpolarized_sfe"] = visibility(single, SpinMode::unpolarized);
  manifest["derived"]["visibility_unpolarized_mfe"] = visibility(stats, SpinMode::unpolarized);
  finish(result, manifest, opt.out);
  result.summary = "closed-form: " + std::to_string(rows.size()) + " phase points";
  return result;
}

CommandResult cmd_coulomb(const RunConfig& cfg, const RunOptions& opt) {
  require_out(opt);
  const Geometry g = cfg.geometry();
  const double d = g.tip_separation();

  coulomb::Trajectory traj;
  bool converged = true;
  std::string failure;
  try {
    traj = coulomb::integrate_relative(d, cfg.integrator());
  } catch (const coulomb::NonConvergence& e) {
    traj = e.partial();
    converged = false;
    failure = e.what();
  }

  output::CsvTable csv({"t_s", "z_m", "z_dot_m_per_s", "energy_drift"});
  for (const auto& s : traj.samples) csv.add_row({s.t, s.z, s.z_dot, s.energy_drift});

  CommandResult result;
  const auto csv_path = output::with_suffix(opt.out, ".csv");
  csv.save(csv_path);
  result.files.push_back(csv_path);

  const double t_f = g.time_of_flight();
  const double analytic = coulomb::dip_width(d, g.wave_vector(), g.screen_distance());
  const double numeric = traj.v_asymptotic * t_f;
  ordered_json dip;
  dip["converged"] = converged;
  if (!converged) dip["error"] = failure;
  dip["steps"] = traj.steps;
  dip["v_rel_end_m_per_s"] = traj.v_asymptotic;
  dip["v_rel_end_closed_form_m_per_s"] = coulomb::end_velocity_closed_form(d);
  dip["final_z_dot_m_per_s"] = traj.final_z_dot;
  dip["t_f_s"] = t_f;
  dip["t_99_s"] = traj.t_99;
  dip["t_99_below_one_percent_of_t_f"] = traj.t_99 > 0.0 && traj.t_99 < 0.01 * t_f;
  dip["v_cms_m_per_s"] = g.center_of_mass_speed();
  dip["z_dip_numeric_m"] = numeric;
  dip["z_dip_analytic_m"] = analytic;
  dip["z_dip_relative_difference"] = (numeric - analytic) / analytic;
  dip["max_energy_drift"] = traj.max_energy_drift;
  const auto dip_path = output::with_suffix(opt.out, ".dip.json");
  output::write_json(dip_path, dip);
  result.files.push_back(dip_path);

  auto manifest = output::make_manifest("coulomb", cfg, stamp(opt));
  manifest["derived"] = derived_block(cfg, cfg.delta_min_rad, cfg.delta_max_rad);
  manifest["converged"] = converged;
  finish(result, manifest, opt.out);

  if (!converged) {
    result.exit_code = kNonConvergence;
    result.summary = "coulomb: " + failure + " (partial output written)";
  } else {
    result.summary = "coulomb: z_dip numeric " + format_double(numeric) + " m, analytic " +
                     format_double(analytic) + " m";
  }
  return result;
}

CommandResult cmd_compose(const RunConfig& cfg, const RunOptions& opt) {
  require_out(opt);
  const auto series = pattern::compose_pattern(cfg.geometry(), cfg.statistics(), cfg.spin_mode,
                                               cfg.screen(), cfg.overlay(), opt.threads);

  output::CsvTable csv({"x_m", "theta_rad", "delta_rad", "g2_fermi", "envelope", "g2_total"});
  for (const auto& p : series.points)
    csv.add_row({p.x, p.theta, p.delta, p.g2_fermi, p.envelope, p.g2_total});

  CommandResult result;
  const auto csv_path = output::with_suffix(opt.out, ".csv");
  csv.save(csv_path);
  result.files.push_back(csv_path);

  const auto& m = series.meta;
  auto manifest = output::make_manifest("compose", cfg, stamp(opt));
  manifest["derived"] = derived_block(cfg, m.delta_min, m.delta_max);
  manifest["derived"]["visibility"] = m.visibility;
  manifest["derived"]["local_maxima_within_dip"] =
      pattern::count_local_maxima(series, 0.5 * m.z_dip);
  finish(result, manifest, opt.out);
  result.summary = "compose: " + std::to_string(series.points.size()) + " screen points, N = " +
                   format_double(m.fringe_count);
  return result;
}

CommandResult cmd_sweep(const RunConfig& cfg, const std::string& parameter,
                        const std::vector<double>& values, const RunOptions& opt) {
  require_out(opt);
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  if (parameter != "d" && parameter != "k" && parameter != "D" && parameter != "mu")
    throw std::invalid_argument("sweep: parameter must be one of d, k, D, mu");

  struct Row {
    double value, lambda_sp, z_dip, n, visibility, z_dip_numeric, n_numeric;
  };
  auto point = [&](double v) {
    double d = cfg.d_m, k = cfg.k_per_m, D = cfg.D_m;
    SourceStatistics stats = cfg.statistics();
    if (parameter == "d") d = v;
    if (parameter == "k") k = v;
    if (parameter == "D") D = v;
    if (parameter == "mu") stats = poissonian_stats(v);
    stats.validate();
    const Geometry g(d, D, k);
    return std::make_pair(g, stats);
  };
  for (double v : values) point(v);

  // The relative motion depends only on d, so non-d sweeps integrate once.
  std::vector<Row> rows(values.size());
  std::optional<double> shared_speed;
  if (parameter != "d")
    shared_speed = coulomb::integrate_relative(cfg.d_m, cfg.integrator()).v_asymptotic;

  parallel_for(values.size(), opt.threads, [&](std::size_t i) {
    const auto [g, stats] = point(values[i]);
    const double d = g.tip_separation();
    const double speed = shared_speed ? *shared_speed
                                      : coulomb::integrate_relative(
                                            d, coulomb::IntegratorConfig::defaults_for(d))
                                            .v_asymptotic;
    const double vis = visibility(stats, cfg.spin_mode);
    const double lambda = g.spatial_wavelength();
    const double z = coulomb::dip_width(d, g.wave_vector(), g.screen_distance());
    const double z_num = speed * g.time_of_flight();
    rows[i] = {values[i], lambda, z, coulomb::fringe_count(d), vis, z_num, z_num / lambda};
  });

  output::CsvTable csv({"value", "lambda_sp_m", "z_dip_m", "fringe_count", "visibility",
                        "z_dip_numeric_m", "fringe_count_numeric"});
  for (const auto& r : rows)
    csv.add_row({r.value, r.lambda_sp, r.z_dip, r.n, r.visibility, r.z_dip_numeric, r.n_numeric});

  CommandResult result;
  const auto csv_path = output::with_suffix(opt.out, ".csv");
  csv.save(csv_path);
  result.files.push_back(csv_path);

  ordered_json checks = ordered_json::array();
  bool all_ok = true;
  auto record = [&](const std::string& name, double value, double target, double tol) {
    const bool ok = std::abs(value - target) <= tol;
    all_ok = all_ok && ok;
    checks.push_back({{"name", name}, {"value", value}, {"target", target},
                      {"tolerance", tol}, {"passed", ok}});
  };
  auto spread = [&](auto field) {
    double lo = 1e300, hi = -1e300;
    for (const auto& r : rows) {
      lo = std::min(lo, field(r));
      hi = std::max(hi, field(r));
    }
    return (hi - lo) / std::max(std::abs(hi), 1e-300);
  };
  auto loglog_slope = [&](auto field) {
    double mx = 0, my = 0;
    for (const auto& r : rows) {
      mx += std::log(r.value);
      my += std::log(field(r));
    }
    mx /= double(rows.size());
    my /= double(rows.size());
    double sxy = 0, sxx = 0;
    for (const auto& r : rows) {
      sxy += (std::log(r.value) - mx) * (std::log(field(r)) - my);
      sxx += (std::log(r.value) - mx) * (std::log(r.value) - mx);
    }
    return sxy / sxx;
  };
  if (rows.size() >= 2) {
    if (parameter == "d") {
      record("slope_log_n_log_d", loglog_slope([](const Row& r) { return r.n; }), 0.5, 1e-12);
      record("slope_log_n_log_d_numeric", loglog_slope([](const Row& r) { return r.n_numeric; }),
             0.5, 1e-3);
    } else if (parameter == "mu") {
      record("visibility_relative_spread", spread([](const Row& r) { return r.visibility; }), 0.0,
             1e-12);
    } else {
      record("fringe_count_relative_spread", spread([](const Row& r) { return r.n; }), 0.0, 1e-12);
    }
  }

  auto manifest = output::make_manifest("sweep", cfg, stamp(opt));
  manifest["derived"] = derived_block(cfg, cfg.delta_min_rad, cfg.delta_max_rad);
  manifest["sweep"] = {{"parameter", parameter}, {"values", values}};
  manifest["checks"] = checks;
  finish(result, manifest, opt.out);

  result.exit_code = all_ok ? kSuccess : kVerificationFailure;
  result.summary = "sweep over " + parameter + ": " + std::to_string(rows.size()) + " values" +
                   (all_ok ? "" : ", scaling check failed");
  return result;
}

CommandResult cmd_oracle(const RunConfig& cfg, const RunOptions& opt) {
  require_out(opt);
  const Geometry g = cfg.geometry();
  const SourceStatistics stats = cfg.statistics();
  const auto stat_kind = cfg.oracle_statistics;
  if (stat_kind == fock::Statistics::boson && stats.p2 != 0.0)
    throw std::invalid_argument("oracle: the boson comparison needs source.p2 = 0");

  const double kd = g.wave_vector() * g.tip_separation();
  const double reach = std::max(std::abs(cfg.delta_min_rad), std::abs(cfg.delta_max_rad));
  if (!(reach < kd))
    throw std::invalid_argument("oracle: phase range needs |delta| < k d = " + format_double(kd));
  const double theta_max = std::asin(reach / kd);
  if (!(theta_max > 0.0)) throw std::invalid_argument("oracle: phase range is a single point");
  const double half = theta_max * (1.0 + 1e-6);

  const int bins = cfg.oracle_bins;
  std::vector<fock::complex> amps(static_cast<std::size_t>(bins));
  const double width = 2.0 * half / bins;
  for (int m = 0; m < bins; ++m) {
    const double theta = -half + (m + 0.5) * width;
    amps[static_cast<std::size_t>(m)] =
        cfg.oracle_envelope == "flat" ? 1.0 : std::exp(-theta * theta / (0.5 * half * half));
  }
  const fock::Engine engine(g, fock::DirectionGrid::normalized(-half, half, amps), stat_kind);

  // Exactly the branches the closed form keeps: one electron per tip, or a
  // pair from one tip and vacuum at the other.
  const auto truncated = fock::restrict_particle_number(
      fock::tensor_product(engine.build_source_ensemble(1, stats),
                           engine.build_source_ensemble(2, stats)),
      2);
  const auto det1 = DetectorPosition::from_angle(g, 0.0);
  const int bin1 = engine.grid().snap(det1.theta()).bin;

  const auto deltas = phase_grid(cfg);
  std::vector<std::vector<double>> rows(deltas.size());
  std::vector<double> rel(deltas.size());
  parallel_for(deltas.size(), opt.threads, [&](std::size_t i) {
    const double delta = deltas[i];
    const auto det2 = DetectorPosition::from_angle(g, std::asin(delta / kd));
    const int bin2 = engine.grid().snap(det2.theta()).bin;
    const EnvelopeWeights env{std::norm(engine.grid().amplitude(bin1)),
                              std::norm(engine.grid().amplitude(bin2))};
    const double exact = phase_delta(g, det2);
    const double closed = stat_kind == fock::Statistics::fermion
                              ? g2_total(exact, stats, env, cfg.spin_mode)
                              : boson_single_emitters(exact, stats, env, cfg.spin_mode);
    const double num = engine.g2_numeric(truncated, det1, det2, cfg.spin_mode);
    rows[i] = {exact, det2.theta(), double(bin2), num, closed, 0.0};
  });

  // Relative to the local value, floored at 1e-6 of the curve maximum so that
  // exact zeros (Pauli nodes) compare on an absolute scale.
  double peak = 0.0;
  for (const auto& r : rows) peak = std::max(peak, std::abs(r[4]));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double diff = std::abs(rows[i][3] - rows[i][4]);
    rel[i] = diff == 0.0 ? 0.0 : diff / std::max({std::abs(rows[i][4]), 1e-6 * peak, 1e-300});
    rows[i][5] = rel[i];
  }

  output::CsvTable csv({"delta_rad", "theta2_rad", "bin2", "g2_engine", "g2_closed_form",
                        "relative_difference"});
  for (const auto& r : rows) csv.add_row(r);

  CommandResult result;
  const auto csv_path = output::with_suffix(opt.out, ".csv");
  csv.save(csv_path);
  result.files.push_back(csv_path);

  const double worst = *std::max_element(rel.begin(), rel.end());
  auto manifest = output::make_manifest("oracle", cfg, stamp(opt));
  manifest["derived"] = derived_block(cfg, deltas.front(), deltas.back());
  manifest["derived"]["max_relative_difference"] = worst;
  manifest["derived"]["grid_half_width_rad"] = half;
  finish(result, manifest, opt.out);

  result.exit_code = worst <= 1e-10 ? kSuccess : kVerificationFailure;
  result.summary = "oracle: max relative difference " + format_double(worst);
  return result;
}

CommandResult cmd_verify(verify::Suite suite, const verify::Options& vopt, const RunOptions& opt) {
  const auto report = verify::run(suite, vopt, [](const verify::CheckResult& c) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << "/" << c.name << ": " << c.detail
              << "\n"
              << std::flush;
  });
  CommandResult result;
  if (!opt.out.empty()) {
    auto doc = report.json();
    doc["suite"] = std::string(verify::to_string(suite));
    doc["mutate_exchange_sign"] = vopt.mutate_exchange_sign;
    const auto path = output::with_suffix(opt.out, ".verify.json");
    output::write_json(path, doc);
    result.files.push_back(path);
  }
  const auto failed = std::count_if(report.checks.begin(), report.checks.end(),
                                    [](const auto& c) { return !c.passed; });
  result.exit_code = report.passed() ? kSuccess : kVerificationFailure;
  result.summary = "verify " + std::string(verify::to_string(suite)) + ": " +
                   std::to_string(report.checks.size() - failed) + " passed, " +
                   std::to_string(failed) + " failed";
  return result;
}

}  // namespace hbt::cli
