#include "hbt/fock_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace hbt::fock {

// ---------------------------------------------------------------------------
// DirectionGrid

DirectionGrid::DirectionGrid(double theta_min, double theta_max, std::vector<complex> amplitudes)
    : theta_min_(theta_min), theta_max_(theta_max), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) {
    throw std::invalid_argument("direction grid needs at least 2 bins");
  }
  if (!(theta_max_ > theta_min_)) {
    throw std::invalid_argument("direction grid needs theta_max > theta_min");
  }
  double norm = 0.0;
  for (const auto& c : amplitudes_) norm += std::norm(c);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument("emission envelope must be normalized, sum |C|^2 = " +
                                std::to_string(norm));
  }
}

DirectionGrid DirectionGrid::flat(double theta_min, double theta_max, int bins) {
  if (bins < 2) throw std::invalid_argument("direction grid needs at least 2 bins");
  const double c = 1.0 / std::sqrt(static_cast<double>(bins));
  return DirectionGrid(theta_min, theta_max,
                       std::vector<complex>(static_cast<std::size_t>(bins), complex(c, 0.0)));
}

DirectionGrid DirectionGrid::normalized(double theta_min, double theta_max,
                                        std::vector<complex> amplitudes) {
  double norm = 0.0;
  for (const auto& c : amplitudes) norm += std::norm(c);
  if (!(norm > 0.0)) throw std::invalid_argument("emission envelope is identically zero");
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& c : amplitudes) c *= scale;
  return DirectionGrid(theta_min, theta_max, std::move(amplitudes));
}

DirectionGrid::Snap DirectionGrid::snap(double theta) const {
  const double width = bin_width();
  const double raw = std::floor((theta - theta_min_) / width);
  const int bin = static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(size() - 1)));
  const double distance = std::abs(theta - center(bin));
  if (distance > 0.5 * width * (1.0 + 1e-12)) {
    throw std::domain_error("detector angle " + std::to_string(theta) +
                            " rad lies off the direction grid");
  }
  return {bin, distance};
}

// ---------------------------------------------------------------------------
// FockState

FockState FockState::vacuum(std::size_t modes) {
  return basis(Occupation(modes, 0));
}

FockState FockState::basis(Occupation occ, complex amplitude) {
  FockState s(occ.size());
  s.add(occ, amplitude);
  return s;
}

void FockState::add(const Occupation& occ, complex amplitude) {
  if (occ.size() != modes_) throw std::invalid_argument("occupation has wrong mode count");
  if (amplitude == complex(0.0, 0.0)) return;
  auto [it, inserted] = terms_.try_emplace(occ, amplitude);
  if (!inserted) {
    it->second += amplitude;
    if (it->second == complex(0.0, 0.0)) terms_.erase(it);
  }
}

FockState& FockState::operator+=(const FockState& other) {
  if (other.modes_ != modes_) throw std::invalid_argument("adding states of different mode count");
  for (const auto& [occ, amp] : other.terms_) add(occ, amp);
  return *this;
}

FockState& FockState::operator*=(complex factor) {
  if (factor == complex(0.0, 0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [occ, amp] : terms_) amp *= factor;
  return *this;
}

FockState operator+(FockState lhs, const FockState& rhs) {
  lhs += rhs;
  return lhs;
}

FockState operator*(complex factor, FockState state) {
  state *= factor;
  return state;
}

complex FockState::inner(const FockState& other) const {
  complex sum = 0.0;
  const auto& small = terms_.size() <= other.terms_.size() ? terms_ : other.terms_;
  const bool this_is_small = &small == &terms_;
  for (const auto& [occ, amp] : small) {
    if (this_is_small) {
      if (auto it = other.terms_.find(occ); it != other.terms_.end()) {
        sum += std::conj(amp) * it->second;
      }
    } else {
      if (auto it = terms_.find(occ); it != terms_.end()) sum += std::conj(it->second) * amp;
    }
  }
  return sum;
}

double FockState::norm_squared() const {
  double n = 0.0;
  for (const auto& [occ, amp] : terms_) n += std::norm(amp);
  return n;
}

FockState FockState::normalized() const {
  const double n = norm_squared();
  if (n == 0.0) return *this;
  FockState out = *this;
  out *= 1.0 / std::sqrt(n);
  return out;
}

int FockState::particle_number() const {
  int number = -1;
  for (const auto& [occ, amp] : terms_) {
    int n = 0;
    for (auto o : occ) n += o;
    if (number >= 0 && n != number) return -1;
    number = n;
  }
  return number;
}

// ---------------------------------------------------------------------------
// Algebra

namespace {

int preceding_parity(const Occupation& occ, std::size_t mode) {
  int count = 0;
  for (std::size_t j = 0; j < mode; ++j) count += occ[j];
  return count & 1;
}

}  // namespace

FockState Algebra::create(const FockState& state, std::size_t mode) const {
  if (mode >= state.mode_count()) throw std::out_of_range("mode index out of range");
  FockState out(state.mode_count());
  for (const auto& [occ, amp] : state.terms()) {
    Occupation next = occ;
    complex factor;
    if (statistics == Statistics::fermion) {
      if (occ[mode] != 0) continue;
      const bool negative = !drop_exchange_sign && preceding_parity(occ, mode) == 1;
      factor = negative ? -1.0 : 1.0;
    } else {
      factor = std::sqrt(static_cast<double>(occ[mode]) + 1.0);
    }
    next[mode] = static_cast<std::uint8_t>(occ[mode] + 1);
    out.add(next, factor * amp);
  }
  return out;
}

FockState Algebra::annihilate(const FockState& state, std::size_t mode) const {
  if (mode >= state.mode_count()) throw std::out_of_range("mode index out of range");
  FockState out(state.mode_count());
  for (const auto& [occ, amp] : state.terms()) {
    if (occ[mode] == 0) continue;
    Occupation next = occ;
    complex factor;
    if (statistics == Statistics::fermion) {
      const bool negative = !drop_exchange_sign && preceding_parity(occ, mode) == 1;
      factor = negative ? -1.0 : 1.0;
    } else {
      factor = std::sqrt(static_cast<double>(occ[mode]));
    }
    next[mode] = static_cast<std::uint8_t>(occ[mode] - 1);
    out.add(next, factor * amp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(Statistics statistics, unsigned source_mask, std::vector<Branch> branches)
    : statistics_(statistics), source_mask_(source_mask), branches_(std::move(branches)) {
  double total = 0.0;
  for (const auto& b : branches_) {
    if (!(b.probability >= 0.0)) throw std::invalid_argument("negative branch probability");
    total += b.probability;
  }
  if (total > 1.0 + 1e-12) {
    throw std::invalid_argument("branch probabilities sum to " + std::to_string(total) + " > 1");
  }
}

double Ensemble::total_probability() const {
  double total = 0.0;
  for (const auto& b : branches_) total += b.probability;
  return total;
}

namespace {

// |psi1> |psi2> expressed in the canonical ordering.
FockState merge_kets(const FockState& first, const FockState& second, Statistics statistics) {
  if (first.mode_count() != second.mode_count()) {
    throw std::invalid_argument("tensor product of states with different mode counts");
  }
  const std::size_t modes = first.mode_count();
  FockState out(modes);
  for (const auto& [occ1, amp1] : first.terms()) {
    for (const auto& [occ2, amp2] : second.terms()) {
      Occupation merged(modes, 0);
      int inversions = 0;
      int occupied_in_second_below = 0;
      for (std::size_t i = 0; i < modes; ++i) {
        if (occ1[i] != 0 && occ2[i] != 0) {
          throw std::invalid_argument("tensor product factors share a mode");
        }
        // Moving the creators of `second` to their canonical place crosses
        // every creator of `first` on a higher mode.
        inversions += occ1[i] * occupied_in_second_below;
        occupied_in_second_below += occ2[i];
        merged[i] = static_cast<std::uint8_t>(occ1[i] + occ2[i]);
      }
      const double sign =
          (statistics == Statistics::fermion && (inversions & 1) == 1) ? -1.0 : 1.0;
      out.add(merged, sign * amp1 * amp2);
    }
  }
  return out;
}

}  // namespace

Ensemble tensor_product(const Ensemble& e1, const Ensemble& e2) {
  if (e1.statistics() != e2.statistics()) {
    throw std::invalid_argument("tensor product of ensembles with different statistics");
  }
  if ((e1.source_mask() & e2.source_mask()) != 0u) {
    throw std::invalid_argument("tensor product of ensembles with overlapping sources");
  }
  std::vector<Branch> branches;
  branches.reserve(e1.branches().size() * e2.branches().size());
  for (const auto& b1 : e1.branches()) {
    for (const auto& b2 : e2.branches()) {
      branches.push_back(
          {b1.probability * b2.probability, merge_kets(b1.state, b2.state, e1.statistics())});
    }
  }
  return Ensemble(e1.statistics(), e1.source_mask() | e2.source_mask(), std::move(branches));
}

Ensemble restrict_particle_number(const Ensemble& rho, int particles) {
  std::vector<Branch> kept;
  for (const auto& b : rho.branches()) {
    if (b.state.particle_number() == particles) kept.push_back(b);
  }
  return Ensemble(rho.statistics(), rho.source_mask(), std::move(kept));
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(Geometry geometry, DirectionGrid grid, Statistics statistics)
    : Engine(std::move(geometry), std::move(grid), statistics, Options{}) {}

Engine::Engine(Geometry geometry, DirectionGrid grid, Statistics statistics, Options options)
    : geometry_(std::move(geometry)),
      grid_(std::move(grid)),
      algebra_{statistics, options.drop_exchange_sign} {}

std::size_t Engine::flat(ModeIndex mode) const {
  if (mode.source < 1 || mode.source > 2) throw std::out_of_range("source must be 1 or 2");
  if (mode.spin < 1 || mode.spin > 2) throw std::out_of_range("spin must be 1 or 2");
  if (mode.bin < 0 || mode.bin >= grid_.size()) throw std::out_of_range("bin out of range");
  return static_cast<std::size_t>(((mode.source - 1) * 2 + (mode.spin - 1)) * grid_.size() +
                                  mode.bin);
}

FockState Engine::apply_creation(const FockState& state, ModeIndex mode) const {
  return algebra_.create(state, flat(mode));
}

FockState Engine::apply_annihilation(const FockState& state, ModeIndex mode) const {
  return algebra_.annihilate(state, flat(mode));
}

void Engine::check_source(int source) const {
  if (source < 1 || source > 2) throw std::out_of_range("source must be 1 or 2");
}

void Engine::check_envelope(std::span<const complex> envelope) const {
  if (envelope.size() != static_cast<std::size_t>(grid_.size())) {
    throw std::invalid_argument("envelope length does not match the direction grid");
  }
}

FockState Engine::build_single_emission(int source, int spin) const {
  return build_single_emission(source, spin, grid_.amplitudes());
}

FockState Engine::build_single_emission(int source, int spin,
                                        std::span<const complex> envelope) const {
  check_source(source);
  check_envelope(envelope);
  const FockState vac = vacuum();
  FockState out(mode_count());
  for (int m = 0; m < grid_.size(); ++m) {
    out += envelope[static_cast<std::size_t>(m)] * apply_creation(vac, {source, spin, m});
  }
  return out;
}

namespace {

FockState raw_double_emission(const Engine& engine, int source, int spin1, int spin2,
                              std::span<const complex> c1, std::span<const complex> c2) {
  FockState out(engine.mode_count());
  const FockState vac = engine.vacuum();
  const int bins = engine.grid().size();
  for (int m2 = 0; m2 < bins; ++m2) {
    const FockState one = engine.apply_creation(vac, {source, spin2, m2});
    for (int m1 = 0; m1 < bins; ++m1) {
      const complex amp = c1[static_cast<std::size_t>(m1)] * c2[static_cast<std::size_t>(m2)];
      if (amp == complex(0.0, 0.0)) continue;
      out += amp * engine.apply_creation(one, {source, spin1, m1});
    }
  }
  return out;
}

}  // namespace

FockState Engine::build_double_emission(int source, int spin1, int spin2,
                                        std::span<const complex> envelope1,
                                        std::span<const complex> envelope2) const {
  check_source(source);
  check_envelope(envelope1);
  check_envelope(envelope2);
  FockState raw = raw_double_emission(*this, source, spin1, spin2, envelope1, envelope2);
  // Cancellation of a Pauli-forbidden product leaves rounding dust at most.
  if (raw.norm_squared() < 1e-24) return FockState(mode_count());
  return raw.normalized();
}

double Engine::double_emission_weight(int source, int spin1, int spin2,
                                      std::span<const complex> envelope1,
                                      std::span<const complex> envelope2) const {
  check_source(source);
  check_envelope(envelope1);
  check_envelope(envelope2);
  const double n =
      raw_double_emission(*this, source, spin1, spin2, envelope1, envelope2).norm_squared();
  return n < 1e-24 ? 0.0 : 0.5 * n;
}

Ensemble Engine::build_source_ensemble(int source, const SourceStatistics& stats) const {
  return build_source_ensemble(source, stats, grid_.amplitudes(), grid_.amplitudes());
}

Ensemble Engine::build_source_ensemble(int source, const SourceStatistics& stats,
                                       std::span<const complex> envelope_a,
                                       std::span<const complex> envelope_b) const {
  check_source(source);
  stats.validate();
  std::vector<Branch> branches;
  branches.push_back({stats.p0, vacuum()});
  for (int spin = 1; spin <= 2; ++spin) {
    branches.push_back({stats.p1, build_single_emission(source, spin)});
  }
  for (int s1 = 1; s1 <= 2; ++s1) {
    for (int s2 = 1; s2 <= 2; ++s2) {
      const double weight = double_emission_weight(source, s1, s2, envelope_a, envelope_b);
      branches.push_back(
          {stats.p2 * weight, build_double_emission(source, s1, s2, envelope_a, envelope_b)});
    }
  }
  return Ensemble(algebra_.statistics, 1u << (source - 1), std::move(branches));
}

DetectorOperator Engine::detector_operator(const DetectorPosition& det, int spin) const {
  const auto snap = grid_.snap(det.theta());
  const double phase = phase_delta(geometry_, det);
  return {snap.bin,
          snap.distance,
          {flat({1, spin, snap.bin}), flat({2, spin, snap.bin})},
          {complex(1.0, 0.0), std::polar(1.0, phase)}};
}

FockState Engine::apply_field(const FockState& state, const DetectorOperator& op) const {
  FockState out = op.coefficients[0] * algebra_.annihilate(state, op.modes[0]);
  out += op.coefficients[1] * algebra_.annihilate(state, op.modes[1]);
  return out;
}

double Engine::g2_block(const Ensemble& rho, const DetectorPosition& det1,
                        const DetectorPosition& det2, int spin1, int spin2) const {
  const DetectorOperator op1 = detector_operator(det1, spin1);
  const DetectorOperator op2 = detector_operator(det2, spin2);
  double total = 0.0;
  for (const auto& branch : rho.branches()) {
    if (branch.probability == 0.0 || branch.state.is_zero()) continue;
    const FockState out = apply_field(apply_field(branch.state, op1), op2);
    total += branch.probability * out.norm_squared();
  }
  return total;
}

double Engine::g2_numeric(const Ensemble& rho, const DetectorPosition& det1,
                          const DetectorPosition& det2, SpinMode mode) const {
  double total = 0.0;
  for (int s1 = 1; s1 <= 2; ++s1) {
    for (int s2 = 1; s2 <= 2; ++s2) {
      const bool equal = s1 == s2;
      if (mode == SpinMode::polarized_equal && !equal) continue;
      if (mode == SpinMode::orthogonal_only && equal) continue;
      total += g2_block(rho, det1, det2, s1, s2);
    }
  }
  return total;
}

TermDecomposition Engine::g2_term_decomposition(const Ensemble& rho, const DetectorPosition& det1,
                                                const DetectorPosition& det2, int spin1,
                                                int spin2) const {
  const DetectorOperator op1 = detector_operator(det1, spin1);
  const DetectorOperator op2 = detector_operator(det2, spin2);
  // (l1, l2, l3, l4) for a+_{l1,s,n1} a+_{l2,s',n2} a_{l3,s',n2} a_{l4,s,n1}, zero-based sources.
  static constexpr std::array<std::array<int, 4>, 6> kPaths = {{
      {0, 0, 0, 0},
      {1, 1, 1, 1},
      {0, 1, 1, 0},
      {1, 0, 0, 1},
      {1, 0, 1, 0},
      {0, 1, 0, 1},
  }};
  TermDecomposition terms{};
  for (const auto& branch : rho.branches()) {
    if (branch.probability == 0.0 || branch.state.is_zero()) continue;
    for (std::size_t t = 0; t < kPaths.size(); ++t) {
      const auto [l1, l2, l3, l4] = kPaths[t];
      const FockState bra = algebra_.annihilate(algebra_.annihilate(branch.state, op1.modes[l1]),
                                                op2.modes[l2]);
      const FockState ket = algebra_.annihilate(algebra_.annihilate(branch.state, op1.modes[l4]),
                                                op2.modes[l3]);
      const complex phase = std::conj(op1.coefficients[l1]) * std::conj(op2.coefficients[l2]) *
                            op2.coefficients[l3] * op1.coefficients[l4];
      terms[t] += branch.probability * phase * bra.inner(ket);
    }
  }
  return terms;
}

}  // namespace hbt::fock
