#include "dpsqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dpsqkd/dps.hpp"

namespace dpsqkd {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

const double kSqrt5 = std::sqrt(5.0);

}  // namespace

void ChannelModel::validate() const {
  require(loss_db_per_km >= 0.0, "channel: loss_db_per_km must be >= 0");
  require(distance_km >= 0.0, "channel: distance_km must be >= 0");
  require(probability(dark_count_prob), "channel: dark_count_prob must be in [0,1]");
  require(detector_efficiency > 0.0 && detector_efficiency <= 1.0,
          "channel: detector_efficiency must be in (0,1]");
  require(probability(baseline_error), "channel: baseline_error must be in [0,1]");
  require(f_ec >= 1.0, "channel: f_ec must be >= 1");
  require(n_pulses >= 3, "channel: n_pulses must be >= 3");
}

double ChannelModel::transmittance() const {
  return std::pow(10.0, -loss_db_per_km * distance_km / 10.0);
}

QberBreakdown qber_from_signal(const ChannelModel& model, double p_signal,
                               double extra_signal_error) {
  QberBreakdown q;
  q.p_signal = p_signal;
  q.p_dark = model.dark_count_prob;
  q.p_click = q.p_signal + q.p_dark;
  if (q.p_click <= 0.0) {
    q.e_b = 0.0;
    return q;
  }
  const double signal_error = std::min(1.0, model.baseline_error + extra_signal_error);
  q.e_b = (0.5 * q.p_dark + signal_error * q.p_signal) / q.p_click;
  return q;
}

QberBreakdown qber(const ChannelModel& model) {
  model.validate();
  return qber_from_signal(model, model.detector_efficiency * model.transmittance());
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

void AttackProfile::validate() const {
  require(per_intercept_error > 0.0 && per_intercept_error <= 1.0,
          "attack profile: per_intercept_error must be in (0,1]");
  require(per_attacked_bit_collision >= 0.5 - 1e-12 && per_attacked_bit_collision <= 1.0 + 1e-12,
          "attack profile: per_attacked_bit_collision must be in [1/2,1]");
  require(sifting_factor > 0.0 && sifting_factor <= 1.0,
          "attack profile: sifting_factor must be in (0,1]");
}

double shrinking_factor(double attacked_fraction, double p_co) {
  if (!probability(attacked_fraction)) {
    throw std::domain_error("shrinking_factor: attacked fraction outside [0,1]");
  }
  if (!(p_co >= 0.5 - 1e-12 && p_co <= 1.0 + 1e-12)) {
    throw std::domain_error("shrinking_factor: collision probability outside [1/2,1]");
  }
  const double pc = std::clamp(p_co, 0.5, 1.0);
  return -attacked_fraction * std::log2(pc) + (1.0 - attacked_fraction);
}

double attacked_fraction(const AttackProfile& profile, double e_b) {
  const double intercepted = std::min(e_b / profile.per_intercept_error, 1.0);
  return profile.sifting_factor * intercepted;
}

double attack_shrinking_factor(const AttackProfile& profile, double e_b) {
  return shrinking_factor(attacked_fraction(profile, e_b), profile.per_attacked_bit_collision);
}

double tau_lower_bound(double e_b) {
  const double p_co = 1.0 - e_b * e_b - 0.5 * (1.0 - 6.0 * e_b) * (1.0 - 6.0 * e_b);
  if (!(p_co > 0.0)) throw std::domain_error("tau_lower_bound: collision bound is not positive");
  if (p_co > 1.0) throw std::domain_error("tau_lower_bound: collision bound exceeds 1");
  return -std::log2(p_co);
}

double secure_key_rate(double p_click, int n_pulses, double tau, double e_b, double f_ec) {
  const double r = sifted_rate(n_pulses) * p_click * (tau - f_ec * binary_entropy(e_b));
  return std::max(0.0, r);
}

double unconditional_rate(double e_b, double r_sifted) {
  const double kPhaseFactor = 3.0 + kSqrt5;
  if (!(e_b >= 0.0 && kPhaseFactor * e_b <= 1.0)) {
    throw std::domain_error("unconditional_rate: (3+sqrt5) e_b must lie in [0,1]");
  }
  const double r = r_sifted * (1.0 - binary_entropy(e_b) - binary_entropy(kPhaseFactor * e_b));
  return std::max(0.0, r);
}

void FiniteSizeParams::validate() const {
  require(n_key >= 1.0, "finite size: n must be >= 1");
  require(k_pe >= 1.0, "finite size: k must be >= 1");
  require(eps_prime > 0.0 && eps_prime < 1.0, "finite size: eps' must be in (0,1)");
}

double finite_size_deviation(const FiniteSizeParams& fs, double e_obs) {
  fs.validate();
  if (!(e_obs > 0.0 && e_obs < 1.0)) {
    throw std::domain_error("finite_size_deviation: e_obs must lie strictly inside (0,1)");
  }
  const double n = fs.n_key;
  const double k = fs.k_pe;
  const double e = e_obs;
  const double var = e * (1.0 - e);
  const double log_c = 1.0 / (8.0 * (n + k)) + 1.0 / (12.0 * k) - 1.0 / (12.0 * k * e + 1.0) -
                       1.0 / (12.0 * k * (1.0 - e) + 1.0);
  const double c = std::exp(log_c);
  const double arg =
      std::sqrt(n + k) * c / (std::sqrt(2.0 * std::numbers::pi * n * k * var) * fs.eps_prime);
  const double t2 = 2.0 * (n + k) * var / (k * n) * std::log(arg);
  if (!(t2 > 0.0)) throw std::domain_error("finite_size_deviation: non-positive radicand");
  return std::sqrt(t2);
}

SweepTable keyrate_sweep(const ChannelModel& model, std::span<const AttackProfile> attacks,
                         std::span<const double> distances_km, const SweepOptions& options) {
  model.validate();
  for (const auto& a : attacks) a.validate();
  if (options.finite_size) options.finite_size->validate();
  if (!std::is_sorted(distances_km.begin(), distances_km.end())) {
    throw std::invalid_argument("keyrate_sweep: distances must be sorted ascending");
  }

  SweepTable table;
  for (const auto& a : attacks) {
    table.tau_columns.push_back(a.name);
    table.rate_columns.push_back(a.name);
  }
  if (options.lower_bound) {
    table.tau_columns.push_back("low");
    table.rate_columns.push_back("low");
  }
  if (options.unconditional) table.rate_columns.push_back("unconditional");

  for (double d : distances_km) {
    ChannelModel m = model;
    m.distance_km = d;
    const QberBreakdown q = qber(m);

    SweepRow row;
    row.distance_km = d;
    row.e_b = q.e_b;
    row.p_click = q.p_click;
    row.e_eff = q.e_b;
    if (options.finite_size && q.e_b > 0.0 && q.e_b < 1.0) {
      row.e_eff = std::min(0.5, q.e_b + finite_size_deviation(*options.finite_size, q.e_b));
    }
    const double e = row.e_eff;

    for (const auto& a : attacks) {
      const double tau = attack_shrinking_factor(a, e);
      row.tau.push_back(tau);
      row.rate.push_back(secure_key_rate(q.p_click, m.n_pulses, tau, e, m.f_ec));
    }
    if (options.lower_bound) {
      // Past e = 1/6 the collision bound is no longer monotone and the rate is
      // zero anyway, so the bound is reported as 0 there.
      const double tau = e <= 1.0 / 6.0 ? tau_lower_bound(e) : 0.0;
      row.tau.push_back(tau);
      row.rate.push_back(secure_key_rate(q.p_click, m.n_pulses, tau, e, m.f_ec));
    }
    if (options.unconditional) {
      const double r_sifted = sifted_rate(m.n_pulses) * q.p_click;
      const bool in_domain = (3.0 + kSqrt5) * e <= 1.0;
      row.rate.push_back(in_domain ? unconditional_rate(e, r_sifted) : 0.0);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<double> distance_grid(double start_km, double stop_km, double step_km) {
  if (!(step_km > 0.0)) throw std::invalid_argument("distance grid: step must be > 0");
  if (stop_km < start_km) throw std::invalid_argument("distance grid: stop must be >= start");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((stop_km - start_km) / step_km + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(start_km + static_cast<double>(i) * step_km);
  return out;
}

}  // namespace dpsqkd
