#pragma once

#include <span>
#include <vector>

#include "dpsqkd/quantum.hpp"

namespace dpsqkd {

/// Single-photon n-pulse DPS signal set. State i has amplitude -1/sqrt(n) on
/// pulse k (k >= 1, zero-based) iff bit k-1 of i is set; pulse 0 is always
/// +1/sqrt(n). For n = 3 the order is [1,1,1], [1,-1,1], [1,1,-1], [1,-1,-1].
struct DpsEnsemble {
  int n = 0;
  std::vector<Ket> states;
  std::vector<double> priors;
  /// bit_map[i][j]: logical bit at phase position j (zero-based, between
  /// pulses j and j+1); 0 when the two amplitudes share a sign.
  std::vector<std::vector<int>> bit_map;

  int size() const { return static_cast<int>(states.size()); }
  HermitianOperator density(int i) const { return HermitianOperator::projector(states.at(i)); }
  std::vector<HermitianOperator> densities() const;
};

inline constexpr int kMaxPulses = 12;

/// Throws std::out_of_range unless 3 <= n <= kMaxPulses.
DpsEnsemble dps_ensemble(int n);

/// Fraction of single-photon detections that land in key slots, (n-1)/n.
double sifted_rate(int n);

/// Bob's one-slot-delay interferometer. `phase_b` is added to the delayed arm.
struct MziModel {
  double phase_b = 0.0;
};

/// Click probabilities per output slot. Slot s (zero-based, 0..n) collects
/// the short arm of pulse s and the long arm of pulse s-1; slots 0 and n are
/// boundary slots, slots 1..n-1 carry key bits.
struct ClickDistribution {
  int pulses = 0;
  std::vector<double> constructive;
  std::vector<double> destructive;

  double total() const;
  double key_slot_total() const;
};

/// Amplitude transfer matrix: rows 2s and 2s+1 give the constructive and
/// destructive amplitudes at slot s for unit input on each pulse.
CMatrix mzi_transfer(int pulses, const MziModel& mzi);

/// Pure input.
ClickDistribution mzi_click_distribution(const Ket& state, const MziModel& mzi);
/// Mixed input, evaluated directly as <t|rho|t> per output mode.
ClickDistribution mzi_click_distribution(const HermitianOperator& state, const MziModel& mzi);
/// Mixed input, evaluated as eigenvalue-weighted pure-state distributions.
ClickDistribution mzi_click_distribution_spectral(const HermitianOperator& state,
                                                  const MziModel& mzi);

enum class BerAccounting {
  /// Wrong-port probability summed over key slots (not renormalized).
  Unconditional,
  /// Same, divided by the key-slot click probability.
  ConditionalOnKeySlot,
};

struct BerReport {
  ClickDistribution clicks;
  std::vector<double> wrong_port;  // per key slot, index 0 = first key slot
  double key_slot_clicks = 0.0;
  double ber = 0.0;
  BerAccounting accounting = BerAccounting::Unconditional;
};

/// Error rate of `received` against the expected bits of one key block.
/// `bits` has one entry per key slot.
BerReport ber_report(const ClickDistribution& clicks, std::span<const int> bits,
                     BerAccounting accounting = BerAccounting::Unconditional);

/// BER through the spectral route: each eigencomponent goes through the
/// interferometer as a pure state and contributes with its eigenvalue weight.
double ber_of_state(const HermitianOperator& received, const DpsEnsemble& ensemble, int index,
                    const MziModel& mzi = {},
                    BerAccounting accounting = BerAccounting::Unconditional);

/// BER through the direct density-matrix route.
double ber_of_state_direct(const HermitianOperator& received, const DpsEnsemble& ensemble,
                           int index, const MziModel& mzi = {},
                           BerAccounting accounting = BerAccounting::Unconditional);

}  // namespace dpsqkd
