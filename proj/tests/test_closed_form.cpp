#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "hbt/closed_form.hpp"

using namespace hbt;

namespace {

const double pi = std::numbers::pi;

SourceStatistics sfe(double p1) { return {1.0 - 2.0 * p1, p1, 0.0}; }

}  // namespace

TEST_CASE("source statistics validation") {
  CHECK_NOTHROW(SourceStatistics{0.5, 0.2, 0.025}.validate());
  CHECK_THROWS_AS((SourceStatistics{0.5, -0.1, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SourceStatistics{0.5, 0.2, 0.1}.validate()), std::invalid_argument);
}

TEST_CASE("equal-spin single-emitter term") {
  const auto stats = sfe(0.1);
  const auto env = EnvelopeWeights::normalized_for(stats);
  CHECK(4 * stats.p1 * stats.p1 * env.c1sq * env.c2sq == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g2_equal_spin_p1sq(0.0, stats, env) == 0.0);
  CHECK(g2_equal_spin_p1sq(pi, stats, env) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(g2_equal_spin_p1sq(pi / 2, stats, env) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("unequal-spin single-emitter term") {
  const auto stats = sfe(0.1);
  const auto env = EnvelopeWeights::normalized_for(stats);
  CHECK(g2_unequal_spin_p1sq(0.3, stats, env) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g2_unequal_spin_p1sq(0.0, stats, env) == g2_unequal_spin_p1sq(pi, stats, env));
  CHECK(g2_unequal_spin_p1sq(1.0, SourceStatistics{1.0, 0.0, 0.0}, env) == 0.0);
}

TEST_CASE("same-source terms") {
  const EnvelopeWeights env{0.7, 1.3};
  const SourceStatistics stats{0.8, 0.05, 0.01};
  const auto t = g2_same_source(0.4, stats, env);
  CHECK(t.equal_spin == 0.0);
  CHECK(t.unequal_spin == doctest::Approx(4 * 0.8 * 0.01 * 0.7 * 1.3));

  const auto none = g2_same_source(0.4, SourceStatistics{0.9, 0.05, 0.0}, env);
  CHECK(none.equal_spin == 0.0);
  CHECK(none.unequal_spin == 0.0);

  const auto doubled = g2_same_source(0.4, SourceStatistics{0.8, 0.05, 0.02}, env);
  CHECK(doubled.unequal_spin == doctest::Approx(2 * t.unequal_spin));

  SUBCASE("general envelopes reduce to the identical-envelope form") {
    const std::complex<double> c1(0.3, -0.4), c2(-0.1, 0.9);
    const auto g = g2_same_source(stats, EnvelopeAmplitudes{c1, c2, c1, c2});
    const auto ref = g2_same_source(0.0, stats, EnvelopeWeights{std::norm(c1), std::norm(c2)});
    CHECK(g.equal_spin == doctest::Approx(0.0));
    CHECK(g.unequal_spin == doctest::Approx(ref.unequal_spin).epsilon(1e-14));
  }
  SUBCASE("envelopes vanishing on opposite detectors leave the equal-spin part") {
    const auto g = g2_same_source(stats, EnvelopeAmplitudes{1.0, 0.0, 0.0, 1.0});
    CHECK(g.equal_spin == doctest::Approx(2 * 0.8 * 0.01));
    CHECK(g.unequal_spin == doctest::Approx(2 * 0.8 * 0.01));
  }
}

TEST_CASE("g2_total") {
  const auto poisson = poissonian_stats(0.3);
  const auto env = EnvelopeWeights::normalized_for(poisson);
  CHECK(g2_total(0.0, poisson, env, SpinMode::unpolarized) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(g2_total(pi, poisson, env, SpinMode::unpolarized) == doctest::Approx(7.0).epsilon(1e-13));

  const auto single = sfe(0.2);
  const auto env1 = EnvelopeWeights::normalized_for(single);
  CHECK(g2_total(0.0, single, env1, SpinMode::unpolarized) == doctest::Approx(2.0).epsilon(1e-14));

  // p1 = 0 gives the same-source offset only.
  const SourceStatistics pairs_only{0.9, 0.0, 0.02};
  const EnvelopeWeights unit{1.0, 1.0};
  for (double d : {0.0, 1.0, pi}) {
    CHECK(g2_total(d, pairs_only, unit, SpinMode::unpolarized) ==
          doctest::Approx(4 * 0.9 * 0.02));
  }
}

TEST_CASE("decomposition identity and contrast") {
  const std::vector<SourceStatistics> cases = {sfe(0.1), poissonian_stats(0.05),
                                               poissonian_stats(1.0), {0.6, 0.1, 0.04},
                                               {0.5, 0.01, 0.1}};
  const EnvelopeWeights env{0.37, 1.9};
  for (const auto& stats : cases) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 720; ++i) {
      const double d = -2 * pi + i * (4 * pi / 720);
      const double total = g2_total(d, stats, env, SpinMode::unpolarized);
      const double parts = g2_equal_spin_p1sq(d, stats, env) + g2_unequal_spin_p1sq(d, stats, env) +
                           g2_same_source(d, stats, env).unequal_spin;
      CHECK(total == doctest::Approx(parts).epsilon(1e-14));
      CHECK(total >= 0.0);
      CHECK(g2_total(d, stats, env, SpinMode::polarized_equal) >= 0.0);
      CHECK(g2_total(d, stats, env, SpinMode::orthogonal_only) >= 0.0);
      lo = std::min(lo, total);
      hi = std::max(hi, total);
    }
    CHECK(std::abs((hi - lo) / (hi + lo) - visibility(stats, SpinMode::unpolarized)) < 1e-12);
  }
}

TEST_CASE("visibility") {
  CHECK(visibility(sfe(0.1), SpinMode::polarized_equal) == 1.0);
  CHECK(visibility(sfe(0.1), SpinMode::unpolarized) == 0.5);
  CHECK(std::abs(visibility(poissonian_stats(0.2), SpinMode::unpolarized) - 0.4) < 1e-12);
  CHECK(visibility(sfe(0.1), SpinMode::orthogonal_only) == 0.0);
  CHECK_THROWS_AS(visibility(SourceStatistics{1.0, 0.0, 0.0}, SpinMode::unpolarized),
                  std::domain_error);
}

TEST_CASE("poissonian_stats") {
  const auto zero = poissonian_stats(0.0);
  CHECK(zero.p0 == 1.0);
  CHECK(zero.p1 == 0.0);
  CHECK(zero.p2 == 0.0);

  const auto s = poissonian_stats(0.2);
  CHECK(s.p0 == doctest::Approx(0.8187307530779818).epsilon(1e-15));
  CHECK(s.p1 == doctest::Approx(0.0818730753077982).epsilon(1e-15));
  CHECK(s.p2 == doctest::Approx(0.0040936537653899095).epsilon(1e-15));

  for (double mu : {1e-4, 0.01, 0.2, 1.0, 3.0}) {
    const auto p = poissonian_stats(mu);
    CHECK(p.p0 * p.p2 / (p.p1 * p.p1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_NOTHROW(p.validate());
  }
  CHECK_THROWS_AS(poissonian_stats(-0.1), std::invalid_argument);
}

TEST_CASE("bosonic reference") {
  CHECK(g2_bosonic_reference(0.0, 2.0) == doctest::Approx(4.0));
  CHECK(g2_bosonic_reference(pi, 2.0) == doctest::Approx(0.0));
  const auto stats = sfe(0.1);
  const auto env = EnvelopeWeights::normalized_for(stats);
  for (int i = 0; i < 64; ++i) {
    const double d = i * 2 * pi / 64;
    CHECK(g2_bosonic_reference(d, 2.0) ==
          doctest::Approx(g2_total(d + pi, stats, env, SpinMode::polarized_equal)).epsilon(1e-12));
  }
}

TEST_CASE("spin mode names") {
  for (auto m : {SpinMode::polarized_equal, SpinMode::unpolarized, SpinMode::orthogonal_only}) {
    CHECK(parse_spin_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_spin_mode("up"), std::invalid_argument);
}
