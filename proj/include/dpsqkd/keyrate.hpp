#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dpsqkd {

struct ChannelModel {
  double loss_db_per_km = 0.2;
  double distance_km = 0.0;
  double dark_count_prob = 1e-6;
  double detector_efficiency = 0.10;
  double baseline_error = 0.01;
  double f_ec = 1.16;
  int n_pulses = 3;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  double transmittance() const;
};

struct QberBreakdown {
  double p_signal = 0.0;
  double p_dark = 0.0;
  double p_click = 0.0;
  double e_b = 0.0;
};

/// Single-photon source: p_signal = eta * 10^(-alpha L / 10).
QberBreakdown qber(const ChannelModel& model);
/// Same error model for an externally supplied signal click probability.
QberBreakdown qber_from_signal(const ChannelModel& model, double p_signal,
                               double extra_signal_error = 0.0);

double binary_entropy(double x);

/// Eve's per-attack parameters feeding the shrinking factor.
struct AttackProfile {
  std::string name;
  double per_intercept_error = 0.0;
  double per_attacked_bit_collision = 0.5;
  /// Share of intercepted pulses that end up as key bits, (n-1)/n.
  double sifting_factor = 2.0 / 3.0;

  void validate() const;
};

/// tau = -g log2(p_co) + (1 - g): collision 1/2 on the unattacked share.
double shrinking_factor(double attacked_fraction, double p_co);

/// Attacked share of key bits for a profile at error rate e_b.
double attacked_fraction(const AttackProfile& profile, double e_b);
double attack_shrinking_factor(const AttackProfile& profile, double e_b);

/// -log2(1 - e^2 - (1 - 6e)^2 / 2), the general individual-attack bound.
double tau_lower_bound(double e_b);

/// max(0, s * p_click * (tau - f_ec h(e_b))) with s = (n-1)/n.
double secure_key_rate(double p_click, int n_pulses, double tau, double e_b, double f_ec);

/// max(0, R_sifted (1 - h(e) - h((3 + sqrt 5) e))).
double unconditional_rate(double e_b, double r_sifted);

struct FiniteSizeParams {
  double n_key = 1e6;
  double k_pe = 1e4;
  double eps_prime = 1e-9;

  void validate() const;
};

/// Deviation t with e_key <= e_obs + t from the parameter-estimation tail
/// bound. Natural logarithms throughout.
double finite_size_deviation(const FiniteSizeParams& fs, double e_obs);

struct SweepRow {
  double distance_km = 0.0;
  double e_b = 0.0;
  double e_eff = 0.0;  // e_b, or e_b + t with finite-size correction
  double p_click = 0.0;
  std::vector<double> tau;   // one per column in SweepTable::tau_columns
  std::vector<double> rate;  // one per column in SweepTable::rate_columns
};

struct SweepTable {
  std::vector<std::string> tau_columns;
  std::vector<std::string> rate_columns;
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  bool lower_bound = true;
  bool unconditional = true;
  std::optional<FiniteSizeParams> finite_size;
};

/// One row per distance (ascending) with tau and R per attack profile, plus
/// the individual-attack lower bound and the unconditional bound if enabled.
SweepTable keyrate_sweep(const ChannelModel& model, std::span<const AttackProfile> attacks,
                         std::span<const double> distances_km, const SweepOptions& options = {});

/// start, start+step, ... up to and including stop (within rounding).
std::vector<double> distance_grid(double start_km, double stop_km, double step_km);

}  // namespace dpsqkd
