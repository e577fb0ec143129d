#include "hbt/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hbt/closed_form.hpp"
#include "hbt/coulomb.hpp"
#include "hbt/fock_engine.hpp"
#include "hbt/physics.hpp"

namespace hbt::verify {

namespace {

using fock::complex;
using fock::Statistics;
constexpr double pi = std::numbers::pi;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// k d = 1000: delta over one period needs |theta| below 6.3 mrad.
Geometry oracle_geometry() { return Geometry(10e-9, 1.0, 1e11); }

fock::Engine make_engine(Statistics stats, bool flat, bool mutate) {
  const std::vector<complex> rough = {{0.3, 0.1}, {0.5, -0.2}, {0.6, 0.0}, {0.2, 0.4}, {-0.1, 0.3}};
  auto grid = flat ? fock::DirectionGrid::flat(-0.01, 0.01, 5)
                   : fock::DirectionGrid::normalized(-0.01, 0.01, rough);
  return fock::Engine(oracle_geometry(), grid, stats, fock::Engine::Options{mutate});
}

DetectorPosition det_at_phase(const Geometry& g, double delta) {
  return DetectorPosition::from_angle(g, std::asin(delta / (g.wave_vector() * g.tip_separation())));
}

fock::Ensemble pair_of_sources(const fock::Engine& e, const SourceStatistics& s) {
  return fock::tensor_product(e.build_source_ensemble(1, s), e.build_source_ensemble(2, s));
}

// fock suite

Outcome check_anticommutation(const Options& opt) {
  const std::size_t modes = 8;
  const fock::Algebra alg{Statistics::fermion, opt.mutate_exchange_sign};
  auto close = [](const fock::FockState& a, const fock::FockState& b) {
    auto diff = a;
    diff += -1.0 * b;
    return diff.norm_squared() < 1e-26;
  };
  int failures = 0, checks = 0;
  for (unsigned bits = 0; bits < (1u << modes); ++bits) {
    fock::Occupation occ(modes);
    for (std::size_t i = 0; i < modes; ++i) occ[i] = (bits >> i) & 1u;
    const auto ket = fock::FockState::basis(occ);
    for (std::size_t i = 0; i < modes; ++i) {
      for (std::size_t j = 0; j < modes; ++j) {
        const auto aa = alg.annihilate(alg.annihilate(ket, j), i) +
                        alg.annihilate(alg.annihilate(ket, i), j);
        const auto cc = alg.create(alg.create(ket, j), i) + alg.create(alg.create(ket, i), j);
        const auto ac = alg.annihilate(alg.create(ket, j), i) + alg.create(alg.annihilate(ket, i), j);
        failures += !aa.is_zero() + !cc.is_zero() + !close(ac, i == j ? ket : fock::FockState(modes));
        checks += 3;
      }
    }
  }
  return {failures == 0, std::to_string(failures) + " of " + std::to_string(checks) +
                             " relations violated on 8 modes"};
}

Outcome check_oracle_equivalence(const Options& opt) {
  const Geometry g = oracle_geometry();
  const auto e = make_engine(Statistics::fermion, false, opt.mutate_exchange_sign);
  const auto det1 = DetectorPosition::from_angle(g, 0.0);
  double worst = 0.0;
  int points = 0;
  for (double p1 : {0.01, 0.05, 0.1, 0.15, 0.2}) {
    for (double p2 : {0.0, 1e-4, 2.5e-4, 5e-4, 1e-3}) {
      const SourceStatistics stats{1.0 - 2 * p1 - 4 * p2, p1, p2};
      const auto rho = fock::restrict_particle_number(pair_of_sources(e, stats), 2);
      for (int i = 0; i < 16; ++i) {
        const double delta = i * 2 * pi / 16;
        const auto det2 = det_at_phase(g, delta);
        const EnvelopeWeights env{std::norm(e.grid().amplitude(e.grid().snap(det1.theta()).bin)),
                                  std::norm(e.grid().amplitude(e.grid().snap(det2.theta()).bin))};
        for (auto mode : {SpinMode::unpolarized, SpinMode::polarized_equal, SpinMode::orthogonal_only}) {
          const double numeric = e.g2_numeric(rho, det1, det2, mode);
          const double closed = g2_total(delta, stats, env, mode);
          // Pauli nodes are exact zeros; compare those on a 1e-12 absolute floor.
          worst = std::max(worst, std::abs(numeric - closed) / std::max(std::abs(closed), 1e-12));
          ++points;
        }
      }
    }
  }
  return {worst <= 1e-10, fmt("max relative deviation %.3g over %.0f points", worst, points)};
}

Outcome check_path_decomposition(const Options& opt) {
  const Geometry g = oracle_geometry();
  const auto e = make_engine(Statistics::fermion, false, opt.mutate_exchange_sign);
  const auto det1 = DetectorPosition::from_angle(g, 0.0);
  double sum_err = 0.0, same_source = 0.0, exchange = 0.0;
  for (const auto& stats : {SourceStatistics{0.8, 0.1, 0.0}, SourceStatistics{0.6, 0.15, 0.025}}) {
    const auto rho = pair_of_sources(e, stats);
    for (double delta : {0.0, 0.7, pi, 4.0}) {
      const auto det2 = det_at_phase(g, delta);
      for (int s1 = 1; s1 <= 2; ++s1) {
        for (int s2 = 1; s2 <= 2; ++s2) {
          const auto t = e.g2_term_decomposition(rho, det1, det2, s1, s2);
          const complex sum = std::accumulate(t.begin(), t.end(), complex(0.0));
          const double block = e.g2_block(rho, det1, det2, s1, s2);
          sum_err = std::max(sum_err, std::abs(sum - block) / std::max(1.0, block));
          if (stats.p2 == 0.0) same_source = std::max({same_source, std::abs(t[0]), std::abs(t[1])});
          if (s1 != s2) exchange = std::max({exchange, std::abs(t[4]), std::abs(t[5])});
        }
      }
    }
  }
  const bool ok = sum_err < 1e-10 && same_source < 1e-15 && exchange < 1e-15;
  return {ok, fmt("sum error %.3g, same-source terms %.3g, cross-spin exchange %.3g", sum_err,
                  same_source, exchange)};
}

double fringe_fit_residual(const fock::Engine& e, double sign) {
  const Geometry g = oracle_geometry();
  const auto det1 = DetectorPosition::from_angle(g, 0.0);
  const auto rho = pair_of_sources(e, SourceStatistics{0.8, 0.1, 0.0});
  double vb = 0.0, bb = 0.0, vv = 0.0;
  std::vector<double> values, basis;
  for (int i = 0; i < 64; ++i) {
    const double delta = i * 2 * pi / 64;
    values.push_back(e.g2_numeric(rho, det1, det_at_phase(g, delta), SpinMode::polarized_equal));
    basis.push_back(1.0 + sign * std::cos(delta));
    vb += values.back() * basis.back();
    bb += basis.back() * basis.back();
    vv += values.back() * values.back();
  }
  double rr = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) rr += std::pow(values[i] - vb / bb * basis[i], 2);
  return std::sqrt(rr / vv);
}

Outcome check_duality(const Options& opt) {
  const double fermi = fringe_fit_residual(make_engine(Statistics::fermion, true, opt.mutate_exchange_sign), -1.0);
  const double bose = fringe_fit_residual(make_engine(Statistics::boson, true, false), +1.0);
  return {fermi < 1e-10 && bose < 1e-10,
          fmt("fit residual fermion [1 - cos] %.3g, boson [1 + cos] %.3g", fermi, bose)};
}

Outcome check_same_source(const Options& opt) {
  const Geometry g = oracle_geometry();
  const auto e = make_engine(Statistics::fermion, false, opt.mutate_exchange_sign);
  const SourceStatistics pairs{0.9, 0.0, 0.025};
  const auto det1 = DetectorPosition::from_angle(g, 0.0);
  const auto det2 = det_at_phase(g, 2.0);
  const auto vac2 = e.build_source_ensemble(2, SourceStatistics{1.0, 0.0, 0.0});
  const double equal = e.g2_numeric(fock::tensor_product(e.build_source_ensemble(1, pairs), vac2),
                                    det1, det2, SpinMode::polarized_equal);
  std::vector<complex> a(5, 0.0), b(5, 0.0);
  a[static_cast<std::size_t>(e.grid().snap(det1.theta()).bin)] = 1.0;
  b[static_cast<std::size_t>(e.grid().snap(det2.theta()).bin)] = 1.0;
  const double split =
      e.g2_numeric(fock::tensor_product(e.build_source_ensemble(1, pairs, a, b), vac2), det1, det2,
                   SpinMode::polarized_equal);
  return {std::abs(equal) < 1e-12 && split > 0.0,
          fmt("equal envelopes %.3g, orthogonal envelopes %.3g", equal, split)};
}

// closed-form suite

Outcome check_visibility_triple(const Options&) {
  const double v1 = visibility(SourceStatistics{0.8, 0.1, 0.0}, SpinMode::polarized_equal);
  const double v2 = visibility(SourceStatistics{0.8, 0.1, 0.0}, SpinMode::unpolarized);
  const double v3 = visibility(poissonian_stats(0.2), SpinMode::unpolarized);
  const bool ok = std::abs(v1 - 1.0) < 1e-12 && std::abs(v2 - 0.5) < 1e-12 && std::abs(v3 - 0.4) < 1e-12;
  return {ok, fmt("polarized %.15g, unpolarized single %.15g, Poisson %.15g", v1, v2, v3)};
}

Outcome check_poisson_identity(const Options&) {
  double worst = 0.0;
  for (double mu : {1e-4, 0.01, 0.2, 1.0, 3.0}) {
    const auto s = poissonian_stats(mu);
    worst = std::max(worst, std::abs(s.p0 * s.p2 / (s.p1 * s.p1) - 0.5));
    worst = std::max(worst, std::abs(visibility(s, SpinMode::unpolarized) - 0.4));
  }
  return {worst < 1e-12, fmt("max deviation from p0 p2 / p1^2 = 1/2 and V = 0.4: %.3g", worst)};
}

Outcome check_block_sum(const Options&) {
  double worst = 0.0;
  const EnvelopeWeights env{0.3, 0.7};
  for (const auto& s : {SourceStatistics{0.8, 0.1, 0.0}, poissonian_stats(0.5), SourceStatistics{0.5, 0.2, 0.02}}) {
    for (int i = 0; i < 64; ++i) {
      const double d = i * 2 * pi / 64;
      const double total = g2_total(d, s, env, SpinMode::unpolarized);
      const double parts = g2_total(d, s, env, SpinMode::polarized_equal) +
                           g2_total(d, s, env, SpinMode::orthogonal_only);
      worst = std::max(worst, std::abs(total - parts) / total);
    }
  }
  return {worst < 1e-14, fmt("unpolarized minus (equal + orthogonal) blocks: %.3g relative", worst)};
}

Outcome check_contrast(const Options&) {
  double worst = 0.0;
  for (const auto& s : {SourceStatistics{0.8, 0.1, 0.0}, poissonian_stats(0.2), SourceStatistics{0.5, 0.2, 0.02}}) {
    for (auto mode : {SpinMode::polarized_equal, SpinMode::unpolarized}) {
      const auto env = EnvelopeWeights::normalized_for(s);
      double lo = 1e300, hi = -1e300;
      for (int i = 0; i <= 400; ++i) {
        const double v = g2_total(-2 * pi + i * 4 * pi / 400, s, env, mode);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, std::abs((hi - lo) / (hi + lo) - visibility(s, mode)));
    }
  }
  return {worst < 1e-12, fmt("sampled contrast vs visibility: %.3g", worst)};
}

Outcome check_boson_shift(const Options&) {
  const SourceStatistics s{0.8, 0.1, 0.0};
  const auto env = EnvelopeWeights::normalized_for(s);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double d = i * 2 * pi / 64;
    worst = std::max(worst, std::abs(g2_bosonic_reference(d, 2.0) -
                                     g2_total(d + pi, s, env, SpinMode::polarized_equal)));
  }
  return {worst < 1e-13, fmt("boson(delta) - fermion(delta + pi): %.3g", worst)};
}

Outcome check_same_source_forms(const Options&) {
  const SourceStatistics s{0.6, 0.15, 0.025};
  const EnvelopeWeights env{0.4, 0.9};
  const auto identical = g2_same_source(1.0, s, env);
  const std::complex<double> a1 = std::polar(std::sqrt(0.4), 0.3), a2 = std::polar(std::sqrt(0.9), -1.1);
  const auto general = g2_same_source(s, EnvelopeAmplitudes{a1, a2, a1, a2});
  const double err = std::max(std::abs(identical.equal_spin - general.equal_spin),
                              std::abs(identical.unequal_spin - general.unequal_spin));
  const auto ortho = g2_same_source(s, EnvelopeAmplitudes{1.0, 0.0, 0.0, 1.0});
  return {err < 1e-15 && identical.equal_spin == 0.0 && ortho.equal_spin > 0.0,
          fmt("identical-envelope mismatch %.3g, orthogonal equal-spin term %.3g", err, ortho.equal_spin)};
}

// coulomb suite

Outcome check_end_velocity(const Options&) {
  double worst = 0.0, drift = 0.0;
  for (double d : {1e-9, 10e-9, 100e-9}) {
    const auto traj = coulomb::integrate_relative(d, coulomb::IntegratorConfig::defaults_for(d));
    worst = std::max(worst, std::abs(traj.v_asymptotic / coulomb::end_velocity_closed_form(d) - 1.0));
    drift = std::max(drift, traj.max_energy_drift);
  }
  return {worst < 1e-3 && drift < 1e-6,
          fmt("max relative end-velocity error %.3g, max energy drift %.3g", worst, drift)};
}

Outcome check_convergence_order(const Options&) {
  const double d0 = 10e-9;
  const double v = coulomb::end_velocity_closed_form(d0);
  std::vector<double> log_dt, log_err;
  for (double n : {50.0, 100.0, 200.0, 400.0}) {
    auto cfg = coulomb::IntegratorConfig::defaults_for(d0);
    cfg.dt = d0 / (n * v);
    cfg.t_max = 1e6 * cfg.dt;
    const auto traj = coulomb::integrate_relative(d0, cfg);
    log_dt.push_back(std::log(cfg.dt));
    log_err.push_back(std::log(std::abs(traj.v_asymptotic - v)));
  }
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 1; i < log_dt.size(); ++i) {
    const double slope = (log_err[i] - log_err[i - 1]) / (log_dt[i] - log_dt[i - 1]);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  return {lo >= 1.9 && hi <= 2.1, fmt("observed order between %.4f and %.4f", lo, hi)};
}

Outcome check_dip_width(const Options&) {
  const double d = 10e-9, k = 1e11, D = 1.0;
  const auto r = coulomb::dip_width_numeric(d, k, D, coulomb::IntegratorConfig::defaults_for(d));
  const double analytic = coulomb::dip_width(d, k, D);
  const double rel = std::abs(r.z_dip / analytic - 1.0);
  const double n_numeric = r.z_dip / (2 * pi * D / (k * d));
  const bool ok = rel < 1e-2 && r.t_99 / r.t_f < 1e-2 && std::abs(analytic / 0.0275 - 1.0) < 1e-2 &&
                  std::abs(n_numeric / 4.37 - 1.0) < 1e-2;
  return {ok, fmt("z_dip numeric %.6g m (relative to analytic %.3g), t_99/t_f %.3g", r.z_dip, rel,
                  r.t_99 / r.t_f)};
}

Outcome check_fringe_invariance(const Options&) {
  const double n0 = coulomb::fringe_count(10e-9);
  double worst = 0.0;
  for (double k : {5e10, 1e11, 2e11}) {
    for (double D : {0.5, 1.0, 2.0}) {
      const double lambda = 2 * pi * D / (k * 10e-9);
      worst = std::max(worst, std::abs(coulomb::dip_width(10e-9, k, D) / lambda / n0 - 1.0));
    }
  }
  std::vector<double> x, y;
  for (double d : {1e-11, 1e-10, 1e-9, 1e-8, 1e-7}) {
    const auto r = coulomb::dip_width_numeric(d, 1e11, 1.0, coulomb::IntegratorConfig::defaults_for(d));
    x.push_back(std::log(d));
    y.push_back(std::log(r.z_dip / (2 * pi / (1e11 * d))));
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {worst < 1e-12 && std::abs(slope - 0.5) < 1e-3,
          fmt("N spread over k, D grid %.3g; numeric slope d log N / d log d = %.6f", worst, slope)};
}

Outcome check_monte_carlo(const Options& opt) {
  const double d = 10e-9, k = 1e11, D = 1.0, sig = 0.005;
  const auto z = coulomb::sample_dip_widths(d, k, sig, D, 10000, 42, opt.threads);
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / z.size();
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / (z.size() - 1));
  const double analytic = coulomb::dip_width(d, k, D);
  const double sigmas = std::abs(mean - analytic) / (sd / std::sqrt(double(z.size())));
  const double rel_sd = sd / analytic;
  return {sigmas < 3.0 && std::abs(rel_sd - sig) < 0.1 * sig,
          fmt("mean offset %.3g standard errors, relative spread %.5g", sigmas, rel_sd)};
}

struct Entry {
  Suite suite;
  const char* name;
  Outcome (*fn)(const Options&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {Suite::fock, "anticommutation", check_anticommutation},
      {Suite::fock, "oracle-equivalence", check_oracle_equivalence},
      {Suite::fock, "path-decomposition", check_path_decomposition},
      {Suite::fock, "fermion-boson-duality", check_duality},
      {Suite::fock, "same-source-suppression", check_same_source},
      {Suite::closed_form, "visibility-triple", check_visibility_triple},
      {Suite::closed_form, "poisson-identity", check_poisson_identity},
      {Suite::closed_form, "spin-block-sum", check_block_sum},
      {Suite::closed_form, "contrast-equals-visibility", check_contrast},
      {Suite::closed_form, "boson-pi-shift", check_boson_shift},
      {Suite::closed_form, "same-source-forms", check_same_source_forms},
      {Suite::coulomb, "end-velocity", check_end_velocity},
      {Suite::coulomb, "convergence-order", check_convergence_order},
      {Suite::coulomb, "dip-width", check_dip_width},
      {Suite::coulomb, "fringe-count-scaling", check_fringe_invariance},
      {Suite::coulomb, "monte-carlo-spread", check_monte_carlo},
  };
  return entries;
}

}  // namespace

Suite parse_suite(std::string_view name) {
  if (name == "fock") return Suite::fock;
  if (name == "closed-form") return Suite::closed_form;
  if (name == "coulomb") return Suite::coulomb;
  if (name == "all") return Suite::all;
  throw std::invalid_argument("unknown verify suite '" + std::string(name) + "'");
}

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::fock: return "fock";
    case Suite::closed_form: return "closed-form";
    case Suite::coulomb: return "coulomb";
    case Suite::all: return "all";
  }
  return "?";
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string Report::text() const {
  std::string out;
  for (const auto& c : checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.2f s)", c.seconds);
    out += std::string(c.passed ? "PASS " : "FAIL ") + c.suite + "/" + c.name + ": " + c.detail + buf + "\n";
  }
  const auto failed = std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; });
  out += std::to_string(checks.size() - failed) + " passed, " + std::to_string(failed) + " failed\n";
  return out;
}

nlohmann::ordered_json Report::json() const {
  nlohmann::ordered_json j;
  j["passed"] = passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"suite", c.suite},
                           {"name", c.name},
                           {"passed", c.passed},
                           {"detail", c.detail},
                           {"seconds", c.seconds}});
  }
  return j;
}

Report run(Suite suite, const Options& options,
           const std::function<void(const CheckResult&)>& progress) {
  Report report;
  for (const auto& entry : registry()) {
    if (suite != Suite::all && entry.suite != suite) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.suite = std::string(to_string(entry.suite));
    r.name = entry.name;
    try {
      const auto outcome = entry.fn(options);
      r.passed = outcome.passed;
      r.detail = outcome.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) progress(r);
    report.checks.push_back(std::move(r));
  }
  return report;
}

}  // namespace hbt::verify
