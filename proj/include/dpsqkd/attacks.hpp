#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpsqkd/dps.hpp"
#include "dpsqkd/keyrate.hpp"
#include "dpsqkd/quantum.hpp"
#include "dpsqkd/sdp.hpp"

namespace dpsqkd {

struct Povm {
  std::vector<HermitianOperator> elements;

  int dim() const { return elements.empty() ? 0 : elements.front().dim(); }
  int size() const { return static_cast<int>(elements.size()); }
  /// Frobenius norm of sum(elements) - I.
  double completeness_residual() const;
  /// Smallest eigenvalue over all elements.
  double min_eigenvalue() const;
  /// Sum = I within 1e-8 and every element PSD within 1e-9.
  bool is_valid(double completeness_tol = 1e-8, double psd_slack = kPsdSlack) const;
};

/// confusion(i, j) = Tr(rho_i P_j).
Eigen::MatrixXd confusion_matrix(std::span<const HermitianOperator> states, const Povm& povm);

struct MedResult {
  Povm povm;
  Eigen::MatrixXd confusion;
  double p_success = 0.0;
  std::optional<double> collision_probability;
  std::vector<double> dual;  // multipliers of the completeness constraints
  KktReport kkt;
  int iterations = 0;
};

/// Minimum-error discrimination of `states` with `priors`. When `bit_map` is
/// given the collision probability of the optimal confusion table is filled in.
MedResult med_attack(std::span<const HermitianOperator> states, std::span<const double> priors,
                     const std::vector<std::vector<int>>* bit_map = nullptr,
                     const SdpOptions& options = {});
MedResult med_attack(const DpsEnsemble& ensemble, const SdpOptions& options = {});

/// Average over bit positions of sum_{x,z} P(x|z)^2 P(z), with posteriors from
/// Bayes' rule on the confusion table. Outcomes with P(z) = 0 are skipped.
double collision_probability(const Eigen::MatrixXd& confusion, std::span<const double> priors,
                             const std::vector<std::vector<int>>& bit_map);

/// Same quantity by enumerating every (state, outcome, bit position) triple.
double collision_probability_bruteforce(const Eigen::MatrixXd& confusion,
                                        std::span<const double> priors,
                                        const std::vector<std::vector<int>>& bit_map);

/// Holevo conditions: Y = sum_i p_i rho_i P_i is Hermitian and Y - p_j rho_j
/// is PSD for every j. Returns the worst violation (0 when all hold exactly).
double holevo_certificate_violation(std::span<const HermitianOperator> states,
                                    std::span<const double> priors, const Povm& povm);

/// Square-root ("pretty good") measurement P_i = S^{-1/2} p_i rho_i S^{-1/2}
/// with S = sum_i p_i rho_i (pseudo-inverse on the support of S).
Povm pretty_good_measurement(std::span<const HermitianOperator> states,
                             std::span<const double> priors);

/// Complete the POVM on the orthogonal complement of the states' span by
/// adding the missing projector to the first element.
Povm complete_povm(Povm povm);

// ---------------------------------------------------------------------------
// Optimal cloning

struct CloningResult {
  HermitianOperator choi;  // on Y (Bob) x X (input) x Z (Eve)
  int dim = 0;
  double avg_two_copy_fidelity = 0.0;
  std::vector<double> per_state_clone_fidelity;  // Bob's single-clone fidelity
  std::vector<HermitianOperator> bob_states;
  std::vector<HermitianOperator> eve_states;
  double tp_residual = 0.0;  // Frobenius norm of Tr_{Y,Z}(J) - I
  KktReport kkt;
  int iterations = 0;
};

/// Apply a channel with Choi matrix `choi` on Y x X x Z (input X of
/// dimension d, outputs Y and Z of dimension d each) to `rho`.
/// Returns the joint output on Y x Z.
HermitianOperator apply_choi(const HermitianOperator& choi, const HermitianOperator& rho, int d);

/// Maximizes the ensemble-averaged two-copy fidelity over all 1 -> 2 channels.
CloningResult optimal_cloner(std::span<const Ket> states, std::span<const double> priors,
                             const SdpOptions& options = {});
CloningResult optimal_cloner(const DpsEnsemble& ensemble, const SdpOptions& options = {});

struct DepolarizingFit {
  double p = 0.0;
  double residual = 0.0;  // Frobenius norm of cloned - fitted
};

/// Least-squares p in cloned ~ (1 - p) original + (p / d) I.
DepolarizingFit depolarizing_fit(const HermitianOperator& original,
                                 const HermitianOperator& cloned);

// ---------------------------------------------------------------------------
// Symmetric unitary cloner

struct UnitaryClonerParams {
  int d = 0;
  double q = 0.0;
  double p = 1.0;
  std::vector<Ket> basis;  // orthonormal e_1..e_d; ancilla uses the computational basis

  /// p = sqrt(1 - 2(d-1) q^2). Throws for q outside [0, 1/sqrt(2(d-1))] or a
  /// non-orthonormal basis.
  static UnitaryClonerParams make(double q, std::vector<Ket> basis);
  static double max_q(int d);
  double unitarity_residual() const;
};

struct UnitaryCloneOutput {
  Ket joint;  // on Bob x Eve x ancilla
  HermitianOperator bob;
  HermitianOperator eve;
};

UnitaryCloneOutput apply_unitary_cloner(const UnitaryClonerParams& params, const Ket& input);

/// Orthonormal basis of the 3-pulse space containing the all-plus state:
/// [1,1,1]/sqrt3, [1,1,-2]/sqrt6, [1,-1,0]/sqrt2.
std::vector<Ket> dps3_cloner_basis();

struct UnitaryOptimum {
  double q_opt = 0.0;
  double avg_fidelity = 0.0;
  int evaluations = 0;
};

/// Mean single-clone fidelity sum_i p_i <psi_i|bob_i|psi_i> at cloning coefficient q.
double unitary_average_fidelity(std::span<const Ket> states, std::span<const double> priors,
                                const std::vector<Ket>& basis, double q);

/// Golden-section maximization of the mean single-clone fidelity over q.
UnitaryOptimum optimize_unitary_q(std::span<const Ket> states, std::span<const double> priors,
                                  const std::vector<Ket>& basis, double tol = 1e-6);

/// MED on Eve's post-cloning states.
MedResult med_on_cloned(std::span<const HermitianOperator> eve_states,
                        std::span<const double> priors,
                        const std::vector<std::vector<int>>* bit_map = nullptr,
                        const SdpOptions& options = {});

// ---------------------------------------------------------------------------
// Interception budgets and attack profiles

/// min(e_b / p_err, 1). Throws std::invalid_argument unless 0 < p_err <= 1 and e_b >= 0.
double intercept_fraction(double p_error_per_intercept, double e_b);

/// Intercept-resend baseline for n = 3: error 1/3 per intercept, per-attacked-bit
/// collision 3/4.
AttackProfile ir_attack_profile(int n_pulses = 3);

AttackProfile make_attack_profile(std::string name, double per_intercept_error,
                                  double per_attacked_bit_collision, int n_pulses);

/// Monte-Carlo estimate of the per-attacked-bit collision probability of the
/// intercept-resend attack. Eve measures each intercepted block with Bob's
/// interferometer and blocks boundary clicks; on a key-slot click she learns
/// one phase bit and resends a state consistent with it.
struct IrMonteCarlo {
  double collision = 0.0;
  double standard_error = 0.0;
  long accepted = 0;
};
IrMonteCarlo ir_collision_monte_carlo(int n_pulses, long trials, std::uint64_t seed);

/// Every intermediate result behind the four explicit-attack profiles.
struct AttackSet {
  DpsEnsemble ensemble;
  MedResult med;
  CloningResult cloning;
  std::vector<double> cloning_ber;  // per state
  double cloning_mean_ber = 0.0;
  MedResult cloning_med;
  UnitaryClonerParams unitary;
  UnitaryOptimum unitary_opt;
  std::vector<HermitianOperator> unitary_bob;
  std::vector<HermitianOperator> unitary_eve;
  std::vector<double> unitary_ber;
  double unitary_mean_ber = 0.0;
  MedResult unitary_med;
  std::vector<AttackProfile> profiles;  // ir, med, cloning, unitary
};

/// Builds the attack set for the 3-pulse ensemble.
AttackSet standard_attack_set(const SdpOptions& options = {});

/// Prior-weighted BER of Bob's received states against the ensemble's bits.
std::vector<double> per_state_ber(std::span<const HermitianOperator> bob_states,
                                  const DpsEnsemble& ensemble,
                                  BerAccounting accounting = BerAccounting::Unconditional);
double mean_ber(std::span<const double> per_state, std::span<const double> priors);

}  // namespace dpsqkd
