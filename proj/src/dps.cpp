#include "dpsqkd/dps.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dpsqkd {

std::vector<HermitianOperator> DpsEnsemble::densities() const {
  std::vector<HermitianOperator> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(HermitianOperator::projector(s));
  return out;
}

DpsEnsemble dps_ensemble(int n) {
  if (n < 3 || n > kMaxPulses) {
    throw std::out_of_range("dps_ensemble: pulse count " + std::to_string(n) +
                            " outside [3, " + std::to_string(kMaxPulses) + "]");
  }
  DpsEnsemble e;
  e.n = n;
  const int count = 1 << (n - 1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < count; ++i) {
    CVector v(n);
    v(0) = amp;
    for (int k = 1; k < n; ++k) v(k) = ((i >> (k - 1)) & 1) ? -amp : amp;
    std::vector<int> bits(static_cast<size_t>(n - 1));
    for (int j = 0; j + 1 < n; ++j) bits[j] = (v(j).real() * v(j + 1).real() > 0) ? 0 : 1;
    e.states.emplace_back(std::move(v));
    e.bit_map.push_back(std::move(bits));
    e.priors.push_back(1.0 / count);
  }
  return e;
}

double sifted_rate(int n) {
  if (n < 1) throw std::out_of_range("sifted_rate: pulse count must be positive");
  return static_cast<double>(n - 1) / n;
}

double ClickDistribution::total() const {
  return std::accumulate(constructive.begin(), constructive.end(), 0.0) +
         std::accumulate(destructive.begin(), destructive.end(), 0.0);
}

double ClickDistribution::key_slot_total() const {
  double s = 0.0;
  for (int slot = 1; slot < pulses; ++slot) s += constructive[slot] + destructive[slot];
  return s;
}

CMatrix mzi_transfer(int pulses, const MziModel& mzi) {
  // a_k -> (u_k + i v_k)/2 + e^{i phi}(u_{k+1} - i v_{k+1})/2
  const Complex delay = std::polar(1.0, mzi.phase_b);
  const Complex i(0.0, 1.0);
  CMatrix t = CMatrix::Zero(2 * (pulses + 1), pulses);
  for (int k = 0; k < pulses; ++k) {
    t(2 * k, k) += 0.5;
    t(2 * k + 1, k) += 0.5 * i;
    t(2 * (k + 1), k) += 0.5 * delay;
    t(2 * (k + 1) + 1, k) += -0.5 * i * delay;
  }
  return t;
}

namespace {

ClickDistribution from_mode_probabilities(int pulses, const Eigen::VectorXd& p) {
  ClickDistribution c;
  c.pulses = pulses;
  for (int s = 0; s <= pulses; ++s) {
    c.constructive.push_back(p(2 * s));
    c.destructive.push_back(p(2 * s + 1));
  }
  return c;
}

}  // namespace

ClickDistribution mzi_click_distribution(const Ket& state, const MziModel& mzi) {
  const CVector out = mzi_transfer(state.dim(), mzi) * state.amplitudes();
  return from_mode_probabilities(state.dim(), out.cwiseAbs2());
}

ClickDistribution mzi_click_distribution(const HermitianOperator& state, const MziModel& mzi) {
  const CMatrix t = mzi_transfer(state.dim(), mzi);
  const CMatrix out = t * state.matrix() * t.adjoint();
  return from_mode_probabilities(state.dim(), out.diagonal().real());
}

ClickDistribution mzi_click_distribution_spectral(const HermitianOperator& state,
                                                  const MziModel& mzi) {
  const auto spec = eig_hermitian(state);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2 * (state.dim() + 1));
  const CMatrix t = mzi_transfer(state.dim(), mzi);
  for (size_t k = 0; k < spec.eigenvalues.size(); ++k) {
    p += spec.eigenvalues[k] * (t * spec.eigenvectors[k].amplitudes()).cwiseAbs2();
  }
  return from_mode_probabilities(state.dim(), p);
}

BerReport ber_report(const ClickDistribution& clicks, std::span<const int> bits,
                     BerAccounting accounting) {
  if (static_cast<int>(bits.size()) != clicks.pulses - 1) {
    throw DimensionMismatch("ber_report: expected one bit per key slot");
  }
  BerReport r;
  r.clicks = clicks;
  r.accounting = accounting;
  double wrong = 0.0;
  for (int slot = 1; slot < clicks.pulses; ++slot) {
    const double w = bits[slot - 1] == 0 ? clicks.destructive[slot] : clicks.constructive[slot];
    r.wrong_port.push_back(w);
    wrong += w;
  }
  r.key_slot_clicks = clicks.key_slot_total();
  r.ber = wrong;
  if (accounting == BerAccounting::ConditionalOnKeySlot) {
    r.ber = r.key_slot_clicks > 0.0 ? wrong / r.key_slot_clicks : 0.0;
  }
  return r;
}

namespace {

void check_received(const HermitianOperator& received, const DpsEnsemble& ensemble, int index) {
  if (index < 0 || index >= ensemble.size()) throw std::out_of_range("ber: state index out of range");
  if (received.dim() != ensemble.n) throw DimensionMismatch("ber: received state has wrong dimension");
  if (!received.is_density(1e-8, 1e-8)) {
    throw std::invalid_argument("ber: received operator is not a density matrix");
  }
}

}  // namespace

double ber_of_state(const HermitianOperator& received, const DpsEnsemble& ensemble, int index,
                    const MziModel& mzi, BerAccounting accounting) {
  check_received(received, ensemble, index);
  return ber_report(mzi_click_distribution_spectral(received, mzi), ensemble.bit_map[index],
                    accounting)
      .ber;
}

double ber_of_state_direct(const HermitianOperator& received, const DpsEnsemble& ensemble,
                           int index, const MziModel& mzi, BerAccounting accounting) {
  check_received(received, ensemble, index);
  return ber_report(mzi_click_distribution(received, mzi), ensemble.bit_map[index], accounting)
      .ber;
}

}  // namespace dpsqkd
