#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "hbt/closed_form.hpp"
#include "hbt/physics.hpp"

// Brute-force second quantization over discrete (source, spin, direction-bin)
// modes. Used as an independent oracle for the closed-form correlators.
//
// Mode ordering: modes are enumerated source-major, then spin, then bin:
//
//   flat(source, spin, bin) = ((source - 1) * 2 + (spin - 1)) * bins + bin
//
// A basis ket with occupations n_i is the ordered product
//   prod_{i ascending} (a_i^dagger)^{n_i} / sqrt(n_i!) |vac>,
// so every fermionic sign is the parity of the occupied modes preceding the
// mode being acted on.

namespace hbt::fock {

using complex = std::complex<double>;

enum class Statistics { fermion, boson };

struct ModeIndex {
  int source = 1;  // 1 or 2
  int spin = 1;    // 1 or 2
  int bin = 0;     // 0 .. bins - 1
};

/// Uniform direction bins over [theta_min, theta_max] with a normalized
/// emission envelope C_m. Continuum modes become Kronecker-normalized bins.
class DirectionGrid {
public:
  /// Throws std::invalid_argument for fewer than 2 bins, an empty range, or
  /// sum |C_m|^2 differing from 1 by more than 1e-12.
  DirectionGrid(double theta_min, double theta_max, std::vector<complex> amplitudes);

  /// C_m = 1/sqrt(M).
  static DirectionGrid flat(double theta_min, double theta_max, int bins);
  /// Rescales `amplitudes` to unit norm before constructing.
  static DirectionGrid normalized(double theta_min, double theta_max,
                                  std::vector<complex> amplitudes);

  int size() const { return static_cast<int>(amplitudes_.size()); }
  double bin_width() const { return (theta_max_ - theta_min_) / size(); }
  double center(int bin) const { return theta_min_ + (bin + 0.5) * bin_width(); }
  std::span<const complex> amplitudes() const { return amplitudes_; }
  complex amplitude(int bin) const { return amplitudes_.at(static_cast<std::size_t>(bin)); }

  struct Snap {
    int bin;
    double distance;  // |theta - center(bin)|
  };
  /// Nearest bin. Throws std::domain_error if theta lies more than half a bin
  /// width from every centre (grid too coarse or detector off the grid).
  Snap snap(double theta) const;

private:
  double theta_min_;
  double theta_max_;
  std::vector<complex> amplitudes_;
};

using Occupation = std::vector<std::uint8_t>;

/// Sparse superposition of occupation-number kets.
class FockState {
public:
  explicit FockState(std::size_t modes) : modes_(modes) {}

  static FockState vacuum(std::size_t modes);
  static FockState basis(Occupation occ, complex amplitude = 1.0);

  std::size_t mode_count() const { return modes_; }
  const std::map<Occupation, complex>& terms() const { return terms_; }

  /// Accumulates `amplitude` onto ket `occ`; exact cancellations are removed.
  void add(const Occupation& occ, complex amplitude);

  FockState& operator+=(const FockState& other);
  FockState& operator*=(complex factor);

  /// <this | other>
  complex inner(const FockState& other) const;
  double norm_squared() const;
  bool is_zero() const { return terms_.empty(); }
  /// Unit-norm copy; the zero state is returned unchanged.
  FockState normalized() const;
  /// Total particle number if every ket agrees, otherwise -1 (also for the zero state).
  int particle_number() const;

private:
  std::size_t modes_;
  std::map<Occupation, complex> terms_;
};

FockState operator+(FockState lhs, const FockState& rhs);
FockState operator*(complex factor, FockState state);

/// Ladder operators on flat mode indices.
struct Algebra {
  Statistics statistics = Statistics::fermion;
  /// Mutation-testing hook: drops the fermionic exchange sign so that
  /// operators on different modes commute. Never set in production runs.
  bool drop_exchange_sign = false;

  FockState create(const FockState& state, std::size_t mode) const;
  FockState annihilate(const FockState& state, std::size_t mode) const;
};

/// Probabilistic mixture of kets; no coherence between branches.
struct Branch {
  double probability;
  FockState state;
};

class Ensemble {
public:
  Ensemble(Statistics statistics, unsigned source_mask, std::vector<Branch> branches);

  Statistics statistics() const { return statistics_; }
  /// Bit (l - 1) set when source l is described by this ensemble.
  unsigned source_mask() const { return source_mask_; }
  const std::vector<Branch>& branches() const { return branches_; }
  double total_probability() const;

private:
  Statistics statistics_;
  unsigned source_mask_;
  std::vector<Branch> branches_;
};

/// rho_1 (x) rho_2 over disjoint sources: all branch pairs, probabilities
/// multiplied, kets merged with the sign fixed by the global mode order.
/// Throws std::invalid_argument on overlapping sources or mixed statistics.
Ensemble tensor_product(const Ensemble& e1, const Ensemble& e2);

/// Keeps only branches whose ket holds exactly `particles` particles. With
/// particles = 2 this is the truncation that neglects p1 p2 and p2^2 terms.
Ensemble restrict_particle_number(const Ensemble& rho, int particles);

/// Field operator sum_l exp(i phase_l) a_{l, spin, bin} at one detector.
struct DetectorOperator {
  int bin;
  double snap_distance;
  std::array<std::size_t, 2> modes;  // source 1, source 2
  std::array<complex, 2> coefficients;
};

/// The six source-resolved contributions to one spin block, in the order
/// (1111), (2222), (1221), (2112), (2121), (1212) for
/// <a+_{l1,s,n1} a+_{l2,s',n2} a_{l3,s',n2} a_{l4,s,n1}>, each multiplied by
/// its detector phase factor: two same-source paths, two cross paths, and
/// the two exchange (interference) terms.
using TermDecomposition = std::array<complex, 6>;

class Engine {
public:
  struct Options {
    bool drop_exchange_sign = false;
  };

  Engine(Geometry geometry, DirectionGrid grid, Statistics statistics);
  Engine(Geometry geometry, DirectionGrid grid, Statistics statistics, Options options);

  const Geometry& geometry() const { return geometry_; }
  const DirectionGrid& grid() const { return grid_; }
  Statistics statistics() const { return algebra_.statistics; }
  std::size_t mode_count() const { return 4 * static_cast<std::size_t>(grid_.size()); }

  /// Throws std::out_of_range for an invalid source, spin, or bin.
  std::size_t flat(ModeIndex mode) const;

  FockState vacuum() const { return FockState::vacuum(mode_count()); }
  FockState apply_creation(const FockState& state, ModeIndex mode) const;
  FockState apply_annihilation(const FockState& state, ModeIndex mode) const;

  /// sum_m C_m a+_{source, spin, m} |vac>, using the grid envelope or `envelope`.
  FockState build_single_emission(int source, int spin) const;
  FockState build_single_emission(int source, int spin, std::span<const complex> envelope) const;

  /// Normalized sum_{m1, m2} C1(m1) C2(m2) a+_{l,s,m1} a+_{l,s',m2} |vac>,
  /// or the zero state when the product amplitude is Pauli-forbidden.
  FockState build_double_emission(int source, int spin1, int spin2,
                                  std::span<const complex> envelope1,
                                  std::span<const complex> envelope2) const;

  /// Fraction of the product amplitude C1 (x) C2 that survives
  /// (anti)symmetrization: half the squared norm of the unnormalized ket above.
  /// 1/2 for distinct spins, 0 for equal spins and equal envelopes (fermions).
  double double_emission_weight(int source, int spin1, int spin2,
                                std::span<const complex> envelope1,
                                std::span<const complex> envelope2) const;

  /// Vacuum (p0), one electron of each spin (p1 each), and the four ordered
  /// spin pairs, each carrying p2 times its (anti)symmetrization weight.
  /// Both electrons of a pair use the grid envelope unless overridden.
  Ensemble build_source_ensemble(int source, const SourceStatistics& stats) const;
  Ensemble build_source_ensemble(int source, const SourceStatistics& stats,
                                 std::span<const complex> envelope_a,
                                 std::span<const complex> envelope_b) const;

  /// Snaps `det` to its bin; source 1 sits at the origin (zero phase),
  /// source 2 picks up phase_delta(geometry, det).
  DetectorOperator detector_operator(const DetectorPosition& det, int spin) const;

  /// sum over selected spin blocks of <Psi+_s(r1) Psi+_s'(r2) Psi_s'(r2) Psi_s(r1)>.
  double g2_numeric(const Ensemble& rho, const DetectorPosition& det1,
                    const DetectorPosition& det2, SpinMode mode = SpinMode::unpolarized) const;

  /// One spin block (s, s').
  double g2_block(const Ensemble& rho, const DetectorPosition& det1, const DetectorPosition& det2,
                  int spin1, int spin2) const;

  TermDecomposition g2_term_decomposition(const Ensemble& rho, const DetectorPosition& det1,
                                          const DetectorPosition& det2, int spin1,
                                          int spin2) const;

private:
  FockState apply_field(const FockState& state, const DetectorOperator& op) const;
  void check_source(int source) const;
  void check_envelope(std::span<const complex> envelope) const;

  Geometry geometry_;
  DirectionGrid grid_;
  Algebra algebra_;
};

}  // namespace hbt::fock
