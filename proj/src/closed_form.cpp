#include "hbt/closed_form.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hbt {

void SourceStatistics::validate() const {
  if (!(p0 >= 0.0) || !(p1 >= 0.0) || !(p2 >= 0.0)) {
    throw std::invalid_argument("emission probabilities must be non-negative");
  }
  if (p0 + 2.0 * p1 + 4.0 * p2 > 1.0 + 1e-9) {
    throw std::invalid_argument("emission probabilities exceed unity: p0 + 2 p1 + 4 p2 = " +
                                std::to_string(p0 + 2.0 * p1 + 4.0 * p2));
  }
}

SpinMode parse_spin_mode(std::string_view name) {
  if (name == "polarized_equal") return SpinMode::polarized_equal;
  if (name == "unpolarized") return SpinMode::unpolarized;
  if (name == "orthogonal_only") return SpinMode::orthogonal_only;
  throw std::invalid_argument("unknown spin mode '" + std::string(name) + "'");
}

std::string_view to_string(SpinMode mode) {
  switch (mode) {
    case SpinMode::polarized_equal: return "polarized_equal";
    case SpinMode::unpolarized: return "unpolarized";
    case SpinMode::orthogonal_only: return "orthogonal_only";
  }
  return "unknown";
}

EnvelopeWeights EnvelopeWeights::normalized_for(const SourceStatistics& stats) {
  if (!(stats.p1 > 0.0)) {
    throw std::domain_error("cannot normalize the correlator prefactor with p1 = 0");
  }
  const double c = 1.0 / (std::sqrt(2.0) * stats.p1);
  return {c, c};
}

namespace {

double p1sq_prefactor(const SourceStatistics& stats, const EnvelopeWeights& env) {
  return 4.0 * stats.p1 * stats.p1 * env.c1sq * env.c2sq;
}

}  // namespace

double g2_equal_spin_p1sq(double delta, const SourceStatistics& stats, const EnvelopeWeights& env) {
  return p1sq_prefactor(stats, env) * (1.0 - std::cos(delta));
}

double g2_unequal_spin_p1sq(double /*delta*/, const SourceStatistics& stats,
                            const EnvelopeWeights& env) {
  return p1sq_prefactor(stats, env);
}

SameSourceTerms g2_same_source(double /*delta*/, const SourceStatistics& stats,
                               const EnvelopeWeights& env) {
  return {0.0, 4.0 * stats.p0 * stats.p2 * env.c1sq * env.c2sq};
}

SameSourceTerms g2_same_source(const SourceStatistics& stats, const EnvelopeAmplitudes& amps) {
  const double w = stats.p0 * stats.p2;
  const double direct = std::norm(amps.a1) * std::norm(amps.b2) +
                        std::norm(amps.a2) * std::norm(amps.b1);
  const double exchange = std::real(amps.a1 * std::conj(amps.a2) * amps.b2 * std::conj(amps.b1));
  // |A1 B2 - A2 B1|^2 >= 0; clamp the rounding residue of the expanded form.
  const double equal = std::max(0.0, 2.0 * w * (direct - 2.0 * exchange));
  return {equal, 2.0 * w * direct};
}

double g2_total(double delta, const SourceStatistics& stats, const EnvelopeWeights& env,
                SpinMode mode) {
  const double equal = g2_equal_spin_p1sq(delta, stats, env);
  const double unequal = g2_unequal_spin_p1sq(delta, stats, env) +
                         g2_same_source(delta, stats, env).unequal_spin;
  switch (mode) {
    case SpinMode::polarized_equal: return equal;
    case SpinMode::orthogonal_only: return unequal;
    case SpinMode::unpolarized: return equal + unequal;
  }
  return 0.0;
}

double visibility(const SourceStatistics& stats, SpinMode mode) {
  switch (mode) {
    case SpinMode::polarized_equal: return 1.0;
    case SpinMode::orthogonal_only:
      if (!(stats.p1 > 0.0)) throw std::domain_error("visibility undefined for p1 = 0");
      return 0.0;
    case SpinMode::unpolarized:
      if (!(stats.p1 > 0.0)) throw std::domain_error("visibility undefined for p1 = 0");
      return 1.0 / (2.0 + stats.p0 * stats.p2 / (stats.p1 * stats.p1));
  }
  return 0.0;
}

SourceStatistics poissonian_stats(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("Poisson mean must be non-negative and finite");
  }
  const double p0 = std::exp(-mu);
  return {p0, mu * p0 / 2.0, mu * mu * p0 / 8.0};
}

double g2_bosonic_reference(double delta, double prefactor) {
  return prefactor * (1.0 + std::cos(delta));
}

}  // namespace hbt
