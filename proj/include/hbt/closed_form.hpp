#pragma once

#include <complex>
#include <string_view>

namespace hbt {

/// Emission-number probabilities of one tip. p1 is the weight of each
/// single-electron spin branch and p2 the weight of each ordered spin pair,
/// so a complete distribution satisfies p0 + 2 p1 + 4 p2 = 1.
struct SourceStatistics {
  double p0 = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;

  /// Throws std::invalid_argument on negative entries or p0 + 2p1 + 4p2 > 1 + 1e-9.
  void validate() const;
};

/// Which spin blocks of the correlator contribute.
enum class SpinMode {
  polarized_equal,  // s = s' only
  unpolarized,      // all four blocks
  orthogonal_only,  // s != s' only
};

SpinMode parse_spin_mode(std::string_view name);
std::string_view to_string(SpinMode mode);

/// |C(k1)|^2 and |C(k2)|^2 at the two detector directions.
struct EnvelopeWeights {
  double c1sq = 1.0;
  double c2sq = 1.0;

  /// Symmetric weights chosen so that 4 p1^2 c1sq c2sq = 2. Requires p1 > 0.
  static EnvelopeWeights normalized_for(const SourceStatistics& stats);
};

/// Complex amplitudes of two (possibly different) emission envelopes A and B
/// at the two detector directions, used by the general same-source term.
struct EnvelopeAmplitudes {
  std::complex<double> a1;
  std::complex<double> a2;
  std::complex<double> b1;
  std::complex<double> b2;
};

struct SameSourceTerms {
  double equal_spin = 0.0;
  double unequal_spin = 0.0;
};

/// One electron per tip, both spin blocks with s = s': 4 p1^2 c1 c2 [1 - cos delta].
double g2_equal_spin_p1sq(double delta, const SourceStatistics& stats, const EnvelopeWeights& env);

/// One electron per tip, both blocks with s != s': 4 p1^2 c1 c2, no oscillation.
double g2_unequal_spin_p1sq(double delta, const SourceStatistics& stats,
                            const EnvelopeWeights& env);

/// Two electrons from the same tip with identical envelopes C_A = C_B:
/// the equal-spin part vanishes and the unequal-spin part is 4 p0 p2 c1 c2.
SameSourceTerms g2_same_source(double delta, const SourceStatistics& stats,
                               const EnvelopeWeights& env);

/// Two electrons from the same tip with arbitrary envelopes A, B:
///   unequal = 2 p0 p2 (|A1|^2 |B2|^2 + |A2|^2 |B1|^2)
///   equal   = unequal - 4 p0 p2 Re[A1 A2* B2 B1*]
/// which reduces to the identical-envelope form when A = B.
SameSourceTerms g2_same_source(const SourceStatistics& stats, const EnvelopeAmplitudes& amps);

/// Far-field correlator summed over the spin blocks selected by `mode`.
/// Unpolarized: 4 p1^2 c1 c2 [2 + p0 p2 / p1^2 - cos delta], evaluated without
/// dividing by p1 so that p1 = 0 gives the pure same-source offset.
double g2_total(double delta, const SourceStatistics& stats, const EnvelopeWeights& env,
                SpinMode mode);

/// Fringe contrast (max - min) / (max + min) of g2_total over delta.
/// Throws std::domain_error for p1 = 0 in the unpolarized and orthogonal modes.
double visibility(const SourceStatistics& stats, SpinMode mode);

/// Poisson emission with mean mu, split evenly over spin branches.
/// Throws std::invalid_argument for negative or non-finite mu.
SourceStatistics poissonian_stats(double mu);

/// Single-boson emitters in a common internal state: prefactor [1 + cos delta].
double g2_bosonic_reference(double delta, double prefactor);

}  // namespace hbt
