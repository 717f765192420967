#include "dpsqkd/attacks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

namespace dpsqkd {

double Povm::completeness_residual() const {
  if (elements.empty()) return 0.0;
  CMatrix sum = CMatrix::Zero(dim(), dim());
  for (const auto& e : elements) sum += e.matrix();
  return (sum - CMatrix::Identity(dim(), dim())).norm();
}

double Povm::min_eigenvalue() const {
  double m = 0.0;
  bool first = true;
  for (const auto& e : elements) {
    const double v = e.min_eigenvalue();
    m = first ? v : std::min(m, v);
    first = false;
  }
  return m;
}

bool Povm::is_valid(double completeness_tol, double psd_slack) const {
  return !elements.empty() && completeness_residual() <= completeness_tol &&
         min_eigenvalue() >= -psd_slack;
}

Eigen::MatrixXd confusion_matrix(std::span<const HermitianOperator> states, const Povm& povm) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(states.size()), povm.size());
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != povm.dim()) throw DimensionMismatch("confusion: dimension mismatch");
    for (int j = 0; j < povm.size(); ++j) c(i, j) = states[i].hs_inner(povm.elements[j]);
  }
  return c;
}

namespace {

void check_ensemble(std::span<const HermitianOperator> states, std::span<const double> priors) {
  if (states.empty()) throw std::invalid_argument("ensemble is empty");
  if (states.size() != priors.size()) {
    throw DimensionMismatch("ensemble: one prior per state required");
  }
  const int d = states.front().dim();
  double total = 0.0;
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != d) throw DimensionMismatch("ensemble: states differ in dimension");
    if (priors[i] < 0.0) throw std::invalid_argument("ensemble: negative prior");
    total += priors[i];
  }
  if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("ensemble: priors must sum to 1");
}

void check_bit_map(const std::vector<std::vector<int>>& bit_map, Eigen::Index states) {
  if (static_cast<Eigen::Index>(bit_map.size()) != states || bit_map.empty()) {
    throw DimensionMismatch("collision: one bit row per state required");
  }
  for (const auto& row : bit_map) {
    if (row.size() != bit_map.front().size() || row.empty()) {
      throw DimensionMismatch("collision: bit rows must share a non-zero length");
    }
  }
}

}  // namespace

MedResult med_attack(std::span<const HermitianOperator> states, std::span<const double> priors,
                     const std::vector<std::vector<int>>* bit_map, const SdpOptions& options) {
  check_ensemble(states, priors);
  const int d = states.front().dim();

  SdpProblem problem;
  std::vector<int> blocks;
  for (size_t i = 0; i < states.size(); ++i) {
    const int b = problem.add_block("P" + std::to_string(i + 1), d);
    problem.set_objective(b, priors[i] * states[i]);
    blocks.push_back(b);
  }
  add_sum_to_identity(problem, blocks, d);

  const SdpSolution sol = solve(problem, options);

  MedResult r;
  r.povm.elements = sol.primal;
  r.confusion = confusion_matrix(states, r.povm);
  for (size_t i = 0; i < states.size(); ++i) r.p_success += priors[i] * r.confusion(i, i);
  r.dual = sol.dual;
  r.kkt = verify_kkt(problem, sol, 1e-6);
  r.iterations = sol.iterations;
  if (bit_map) r.collision_probability = collision_probability(r.confusion, priors, *bit_map);
  return r;
}

MedResult med_attack(const DpsEnsemble& ensemble, const SdpOptions& options) {
  const auto rho = ensemble.densities();
  return med_attack(rho, ensemble.priors, &ensemble.bit_map, options);
}

double collision_probability(const Eigen::MatrixXd& confusion, std::span<const double> priors,
                             const std::vector<std::vector<int>>& bit_map) {
  if (static_cast<size_t>(confusion.rows()) != priors.size()) {
    throw DimensionMismatch("collision: one prior per confusion row required");
  }
  check_bit_map(bit_map, confusion.rows());
  for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
    if (std::abs(confusion.row(i).sum() - 1.0) > 1e-6) {
      throw std::invalid_argument("collision: confusion table is not row-stochastic");
    }
  }
  const size_t positions = bit_map.front().size();
  double total = 0.0;
  for (size_t pos = 0; pos < positions; ++pos) {
    for (Eigen::Index z = 0; z < confusion.cols(); ++z) {
      double pz = 0.0;
      double joint[2] = {0.0, 0.0};
      for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
        const double w = priors[i] * confusion(i, z);
        pz += w;
        joint[bit_map[i][pos] ? 1 : 0] += w;
      }
      if (pz <= 0.0) continue;
      const double p0 = joint[0] / pz;
      const double p1 = joint[1] / pz;
      total += (p0 * p0 + p1 * p1) * pz;
    }
  }
  return total / static_cast<double>(positions);
}

double collision_probability_bruteforce(const Eigen::MatrixXd& confusion,
                                        std::span<const double> priors,
                                        const std::vector<std::vector<int>>& bit_map) {
  check_bit_map(bit_map, confusion.rows());
  const size_t positions = bit_map.front().size();
  const Eigen::Index m = confusion.rows();
  // E over (state i, outcome z, position) of P(bit_pos = bit_pos(i) | z):
  // this equals sum_z P(z) sum_x P(x|z)^2 for each position.
  double total = 0.0;
  for (size_t pos = 0; pos < positions; ++pos) {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index z = 0; z < confusion.cols(); ++z) {
        const double pjoint = priors[i] * confusion(i, z);
        if (pjoint <= 0.0) continue;
        double pz = 0.0;
        double match = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double w = priors[k] * confusion(k, z);
          pz += w;
          if (bit_map[k][pos] == bit_map[i][pos]) match += w;
        }
        total += pjoint * match / pz;
      }
    }
  }
  return total / static_cast<double>(positions);
}

double holevo_certificate_violation(std::span<const HermitianOperator> states,
                                    std::span<const double> priors, const Povm& povm) {
  check_ensemble(states, priors);
  if (static_cast<size_t>(povm.size()) != states.size()) {
    throw DimensionMismatch("holevo: one POVM element per state required");
  }
  const int d = states.front().dim();
  CMatrix y = CMatrix::Zero(d, d);
  for (size_t i = 0; i < states.size(); ++i) {
    y += priors[i] * states[i].matrix() * povm.elements[i].matrix();
  }
  double worst = (y - y.adjoint()).norm();
  const HermitianOperator yh(CMatrix((y + y.adjoint()) / 2.0));
  for (size_t j = 0; j < states.size(); ++j) {
    const double lmin = (yh - priors[j] * states[j]).min_eigenvalue();
    worst = std::max(worst, -lmin);
  }
  return std::max(worst, 0.0);
}

Povm pretty_good_measurement(std::span<const HermitianOperator> states,
                             std::span<const double> priors) {
  check_ensemble(states, priors);
  const int d = states.front().dim();
  HermitianOperator s = HermitianOperator::zero(d);
  for (size_t i = 0; i < states.size(); ++i) s += priors[i] * states[i];
  const auto spec = eig_hermitian(s);
  const double cutoff = 1e-12 * std::max(1.0, spec.eigenvalues.front());
  CMatrix inv_sqrt = CMatrix::Zero(d, d);
  for (size_t k = 0; k < spec.eigenvalues.size(); ++k) {
    if (spec.eigenvalues[k] <= cutoff) continue;
    const CVector& v = spec.eigenvectors[k].amplitudes();
    inv_sqrt += (1.0 / std::sqrt(spec.eigenvalues[k])) * v * v.adjoint();
  }
  Povm povm;
  for (size_t i = 0; i < states.size(); ++i) {
    const CMatrix m = inv_sqrt * (priors[i] * states[i].matrix()) * inv_sqrt;
    povm.elements.emplace_back(CMatrix((m + m.adjoint()) / 2.0), 1e-9);
  }
  return complete_povm(std::move(povm));
}

Povm complete_povm(Povm povm) {
  if (povm.elements.empty()) throw std::invalid_argument("complete_povm: empty POVM");
  const int d = povm.dim();
  CMatrix rest = CMatrix::Identity(d, d);
  for (const auto& e : povm.elements) rest -= e.matrix();
  povm.elements.front() += HermitianOperator(CMatrix((rest + rest.adjoint()) / 2.0), 1e-9);
  return povm;
}

double intercept_fraction(double p_error_per_intercept, double e_b) {
  if (!(p_error_per_intercept > 0.0 && p_error_per_intercept <= 1.0)) {
    throw std::invalid_argument("intercept_fraction: error per intercept must be in (0,1]");
  }
  if (!(e_b >= 0.0)) throw std::invalid_argument("intercept_fraction: e_b must be >= 0");
  return std::min(e_b / p_error_per_intercept, 1.0);
}

AttackProfile make_attack_profile(std::string name, double per_intercept_error,
                                  double per_attacked_bit_collision, int n_pulses) {
  AttackProfile a;
  a.name = std::move(name);
  a.per_intercept_error = per_intercept_error;
  a.per_attacked_bit_collision = per_attacked_bit_collision;
  a.sifting_factor = sifted_rate(n_pulses);
  a.validate();
  return a;
}

AttackProfile ir_attack_profile(int n_pulses) {
  return make_attack_profile("ir", 1.0 / 3.0, 0.75, n_pulses);
}

IrMonteCarlo ir_collision_monte_carlo(int n_pulses, long trials, std::uint64_t seed) {
  const DpsEnsemble ens = dps_ensemble(n_pulses);
  const int slots = n_pulses + 1;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_state(0, ens.size() - 1);

  // Mode distributions of every pure signal state: index 2s + (destructive).
  std::vector<std::discrete_distribution<int>> modes;
  for (const auto& psi : ens.states) {
    const ClickDistribution c = mzi_click_distribution(psi, MziModel{});
    std::vector<double> w;
    for (int s = 0; s < slots; ++s) {
      w.push_back(c.constructive[s]);
      w.push_back(c.destructive[s]);
    }
    modes.emplace_back(w.begin(), w.end());
  }

  // Eve's view z = (her position, her bit, Bob's position); x = Alice's bit
  // at Bob's position.
  std::map<std::tuple<int, int, int>, std::array<long, 2>> counts;
  long accepted = 0;
  for (long t = 0; t < trials; ++t) {
    const int alice = pick_state(rng);
    const int eve_mode = modes[alice](rng);
    const int eve_slot = eve_mode / 2;
    if (eve_slot == 0 || eve_slot == n_pulses) continue;  // blocked
    const int eve_pos = eve_slot - 1;
    const int eve_bit = eve_mode % 2;

    std::vector<int> consistent;
    for (int k = 0; k < ens.size(); ++k) {
      if (ens.bit_map[k][eve_pos] == eve_bit) consistent.push_back(k);
    }
    std::uniform_int_distribution<size_t> pick(0, consistent.size() - 1);
    const int resent = consistent[pick(rng)];

    const int bob_slot = modes[resent](rng) / 2;
    if (bob_slot == 0 || bob_slot == n_pulses) continue;  // no key bit
    const int bob_pos = bob_slot - 1;
    ++counts[{eve_pos, eve_bit, bob_pos}][ens.bit_map[alice][bob_pos]];
    ++accepted;
  }

  IrMonteCarlo r;
  r.accepted = accepted;
  if (accepted == 0) return r;
  for (const auto& [z, c] : counts) {
    const double nz = static_cast<double>(c[0] + c[1]);
    const double p0 = c[0] / nz;
    const double p1 = c[1] / nz;
    r.collision += (p0 * p0 + p1 * p1) * nz / static_cast<double>(accepted);
  }
  r.standard_error = std::sqrt(r.collision * (1.0 - r.collision) / static_cast<double>(accepted));
  return r;
}

std::vector<double> per_state_ber(std::span<const HermitianOperator> bob_states,
                                  const DpsEnsemble& ensemble, BerAccounting accounting) {
  if (static_cast<int>(bob_states.size()) != ensemble.size()) {
    throw DimensionMismatch("per_state_ber: one received state per signal state required");
  }
  std::vector<double> out;
  for (int i = 0; i < ensemble.size(); ++i) {
    out.push_back(ber_of_state(bob_states[i], ensemble, i, MziModel{}, accounting));
  }
  return out;
}

double mean_ber(std::span<const double> per_state, std::span<const double> priors) {
  if (per_state.size() != priors.size()) throw DimensionMismatch("mean_ber: size mismatch");
  double m = 0.0;
  for (size_t i = 0; i < per_state.size(); ++i) m += priors[i] * per_state[i];
  return m;
}

AttackSet standard_attack_set(const SdpOptions& options) {
  AttackSet s;
  s.ensemble = dps_ensemble(3);
  const auto& ens = s.ensemble;

  s.med = med_attack(ens, options);

  s.cloning = optimal_cloner(ens, options);
  s.cloning_ber = per_state_ber(s.cloning.bob_states, ens);
  s.cloning_mean_ber = mean_ber(s.cloning_ber, ens.priors);
  s.cloning_med = med_on_cloned(s.cloning.eve_states, ens.priors, &ens.bit_map, options);

  const auto basis = dps3_cloner_basis();
  s.unitary_opt = optimize_unitary_q(ens.states, ens.priors, basis);
  s.unitary = UnitaryClonerParams::make(s.unitary_opt.q_opt, basis);
  for (const auto& psi : ens.states) {
    auto out = apply_unitary_cloner(s.unitary, psi);
    s.unitary_bob.push_back(std::move(out.bob));
    s.unitary_eve.push_back(std::move(out.eve));
  }
  s.unitary_ber = per_state_ber(s.unitary_bob, ens);
  s.unitary_mean_ber = mean_ber(s.unitary_ber, ens.priors);
  s.unitary_med = med_on_cloned(s.unitary_eve, ens.priors, &ens.bit_map, options);

  s.profiles.push_back(ir_attack_profile(ens.n));
  s.profiles.push_back(
      make_attack_profile("med", 1.0 - s.med.p_success, *s.med.collision_probability, ens.n));
  s.profiles.push_back(make_attack_profile("cloning", s.cloning_mean_ber,
                                           *s.cloning_med.collision_probability, ens.n));
  s.profiles.push_back(make_attack_profile("unitary", s.unitary_mean_ber,
                                           *s.unitary_med.collision_probability, ens.n));
  return s;
}

}  // namespace dpsqkd
