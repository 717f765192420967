#include <gtest/gtest.h>

#include <random>

#include "dpsqkd/attacks.hpp"
#include "oracles.hpp"

using namespace dpsqkd;

namespace {

const AttackSet& attack_set() {
  static const AttackSet s = standard_attack_set();
  return s;
}

std::vector<oracle::CMatrix> matrices(const std::vector<HermitianOperator>& ops) {
  std::vector<oracle::CMatrix> out;
  for (const auto& o : ops) out.push_back(o.matrix());
  return out;
}

}  // namespace

TEST(Med, ThreePulseOptimumAndConfusion) {
  const auto& med = attack_set().med;
  EXPECT_NEAR(med.p_success, oracle::kMed3, 1e-8);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(med.confusion.row(i).sum(), 1.0, 1e-8);
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(med.confusion(i, j), i == j ? oracle::kMed3 : oracle::kMedOffDiagonal, 1e-7);
    }
  }
  EXPECT_TRUE(med.povm.is_valid());
  EXPECT_TRUE(med.kkt.passed());
  EXPECT_NEAR(*med.collision_probability, oracle::kCollisionMed3, 1e-7);
}

TEST(Med, HolevoCertificateHolds) {
  const auto ens = dps_ensemble(3);
  const auto& med = attack_set().med;
  EXPECT_LT(holevo_certificate_violation(ens.densities(), ens.priors, med.povm), 1e-6);
}

TEST(Med, PrettyGoodMeasurementOracleMatches) {
  for (int n : {3, 4, 5}) {
    const auto ens = dps_ensemble(n);
    const auto rho = ens.densities();
    const auto pgm = oracle::pgm(matrices(rho), ens.priors);
    double p = 0.0;
    for (size_t i = 0; i < rho.size(); ++i) p += ens.priors[i] * (rho[i].matrix() * pgm[i]).trace().real();
    const auto med = med_attack(ens);
    EXPECT_GE(med.p_success, p - 1e-8);
    EXPECT_NEAR(med.p_success, p, 1e-7) << "n=" << n;
    const Povm lib_pgm = pretty_good_measurement(rho, ens.priors);
    EXPECT_TRUE(lib_pgm.is_valid());
  }
}

TEST(Med, MixedStatesAndUnequalPriors) {
  // Two qubit states with unequal priors: Helstrom bound.
  const auto a = HermitianOperator::projector(Ket::basis(2, 0));
  const auto b = HermitianOperator::projector(Ket{1.0, 1.0}.normalized());
  const std::vector<HermitianOperator> states = {a, b};
  const std::vector<double> priors = {0.2, 0.8};
  const auto med = med_attack(states, priors);
  EXPECT_NEAR(med.p_success, 0.5 * (1 + std::sqrt(1 - 4 * 0.2 * 0.8 * 0.5)), 1e-8);
  EXPECT_FALSE(med.collision_probability.has_value());
  EXPECT_THROW(med_attack(states, std::vector<double>{0.5, 0.6}), std::invalid_argument);
}

TEST(Collision, IdentityConfusionIsCertain) {
  const auto ens = dps_ensemble(3);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  EXPECT_NEAR(collision_probability(id, ens.priors, ens.bit_map), 1.0, 1e-15);
  const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(4, 4, 0.25);
  EXPECT_NEAR(collision_probability(uniform, ens.priors, ens.bit_map), 0.5, 1e-15);
}

TEST(Collision, BruteForceAgreesOnRandomTables) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto ens = dps_ensemble(3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd c(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) c(i, j) = u(rng);
      c.row(i) /= c.row(i).sum();
    }
    c.col(3).setZero();  // exercise skipped outcomes
    for (int i = 0; i < 4; ++i) c.row(i) /= c.row(i).sum();
    EXPECT_NEAR(collision_probability(c, ens.priors, ens.bit_map),
                collision_probability_bruteforce(c, ens.priors, ens.bit_map), 1e-13);
  }
}

TEST(Cloning, ChoiIsCptpAndSymmetric) {
  const auto& c = attack_set().cloning;
  EXPECT_LT(c.tp_residual, 1e-7);
  EXPECT_GT(c.choi.min_eigenvalue(), -1e-7);
  EXPECT_NEAR(c.avg_two_copy_fidelity, oracle::kCloneOptimum, 1e-6);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT(c.bob_states[i].frobenius_distance(c.eve_states[i]), 1e-6);
    EXPECT_NEAR(c.per_state_clone_fidelity[i], oracle::kCloneFidelity, 1e-6);
    EXPECT_TRUE(c.bob_states[i].is_density(1e-8, 1e-8));
  }
}

TEST(Cloning, IdentityChoiActsAsIdentity) {
  // Choi of rho -> rho (x) |0><0| on Y x X x Z.
  const int d = 2;
  CVector omega = CVector::Zero(d * d * d);
  for (int x = 0; x < d; ++x) omega((x * d + x) * d + 0) = 1.0;
  const HermitianOperator j(CMatrix(omega * omega.adjoint()));
  const auto rho = HermitianOperator::projector(Ket{Complex(0.6, 0), Complex(0, 0.8)});
  const auto out = apply_choi(j, rho, d);
  EXPECT_LT(partial_trace(out, {d, d}, {0}).frobenius_distance(rho), 1e-14);
}

TEST(Depolarizing, FitTrivialCasesAndOracle) {
  const auto ens = dps_ensemble(3);
  const auto rho = ens.density(2);
  EXPECT_NEAR(depolarizing_fit(rho, rho).p, 0.0, 1e-15);
  const auto mixed = (1.0 / 3.0) * HermitianOperator::identity(3);
  const auto full = depolarizing_fit(rho, mixed);
  EXPECT_NEAR(full.p, 1.0, 1e-14);
  EXPECT_LT(full.residual, 1e-14);
  const auto& bob = attack_set().cloning.bob_states[2];
  EXPECT_NEAR(depolarizing_fit(rho, bob).p, oracle::depolarizing_p_entrywise(rho.matrix(), bob.matrix()), 1e-12);
  EXPECT_NEAR(depolarizing_fit(rho, bob).p, oracle::kCloneDepolarizing, 1e-6);
}

TEST(UnitaryCloner, IsometryAndSymmetry) {
  const auto basis = dps3_cloner_basis();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (double q : {0.0, 0.1, 0.23, UnitaryClonerParams::max_q(3)}) {
    const auto params = UnitaryClonerParams::make(q, basis);
    EXPECT_LT(params.unitarity_residual(), 1e-12);
    for (int trial = 0; trial < 5; ++trial) {
      const Ket in = Ket{Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng))}.normalized();
      const auto out = apply_unitary_cloner(params, in);
      EXPECT_NEAR(out.joint.norm(), 1.0, 1e-10);
      EXPECT_LT(out.bob.frobenius_distance(out.eve), 1e-10);
    }
  }
}

TEST(UnitaryCloner, ZeroCouplingCopiesBasisStates) {
  const auto basis = dps3_cloner_basis();
  const auto params = UnitaryClonerParams::make(0.0, basis);
  const auto out = apply_unitary_cloner(params, basis[0]);
  EXPECT_LT(out.bob.frobenius_distance(HermitianOperator::projector(basis[0])), 1e-14);
}

TEST(UnitaryCloner, Validation) {
  const auto basis = dps3_cloner_basis();
  EXPECT_THROW(UnitaryClonerParams::make(0.6, basis), std::invalid_argument);
  EXPECT_THROW(UnitaryClonerParams::make(-0.1, basis), std::invalid_argument);
  auto bad = basis;
  bad[1] = basis[0];
  EXPECT_THROW(UnitaryClonerParams::make(0.1, bad), std::invalid_argument);
  const auto params = UnitaryClonerParams::make(0.1, basis);
  EXPECT_THROW(apply_unitary_cloner(params, Ket{1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST(UnitaryCloner, OptimizerFindsInteriorAndBoundaryOptima) {
  const auto basis = dps3_cloner_basis();
  const auto& s = attack_set();
  EXPECT_NEAR(s.unitary_opt.q_opt, 0.2328, 1e-3);
  // Golden-section result is a local maximum on a fine grid.
  const auto ens = dps_ensemble(3);
  for (double dq : {-1e-3, 1e-3}) {
    EXPECT_LE(unitary_average_fidelity(ens.states, ens.priors, basis, s.unitary_opt.q_opt + dq),
              s.unitary_opt.avg_fidelity + 1e-12);
  }
  const std::vector<Ket> single = {basis[0]};
  const std::vector<double> one = {1.0};
  const auto opt = optimize_unitary_q(single, one, basis);
  EXPECT_NEAR(opt.q_opt, 0.0, 1e-6);
  EXPECT_NEAR(opt.avg_fidelity, 1.0, 1e-10);
}

TEST(PostCloningMed, DataProcessingAndReduction) {
  const auto& s = attack_set();
  EXPECT_LE(s.cloning_med.p_success, s.med.p_success + 1e-9);
  EXPECT_LE(s.unitary_med.p_success, s.med.p_success + 1e-9);
  const auto ens = dps_ensemble(3);
  const auto direct = med_on_cloned(ens.densities(), ens.priors, &ens.bit_map);
  EXPECT_NEAR(direct.p_success, 0.75, 1e-8);
  EXPECT_THROW(med_on_cloned(std::vector<HermitianOperator>{HermitianOperator::identity(3)},
                             std::vector<double>{1.0}),
               std::invalid_argument);
}

TEST(InterceptFraction, ExamplesAndClamp) {
  EXPECT_NEAR(intercept_fraction(0.25, 0.01), 0.04, 1e-15);
  EXPECT_NEAR(intercept_fraction(0.13, 0.01), 0.01 / 0.13, 1e-15);
  EXPECT_NEAR(intercept_fraction(0.15, 0.01), 0.01 / 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(intercept_fraction(0.13, 0.2), 1.0);
  EXPECT_THROW(intercept_fraction(0.0, 0.01), std::invalid_argument);
  EXPECT_THROW(intercept_fraction(1.5, 0.01), std::invalid_argument);
  EXPECT_THROW(intercept_fraction(0.2, -0.01), std::invalid_argument);
}

TEST(InterceptResend, ProfileAndMonteCarloOracle) {
  const auto ir = ir_attack_profile();
  EXPECT_NEAR(ir.per_intercept_error, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(intercept_fraction(ir.per_intercept_error, 0.01), 0.03, 1e-15);
  EXPECT_DOUBLE_EQ(attack_shrinking_factor(ir, 0.0), 1.0);
  const auto mc = ir_collision_monte_carlo(3, 400000, 20240601);
  EXPECT_NEAR(mc.collision, ir.per_attacked_bit_collision, 4.0 * mc.standard_error + 1e-3);
}

TEST(AttackSet, ProfilesUseComputedQuantities) {
  const auto& s = attack_set();
  ASSERT_EQ(s.profiles.size(), 4u);
  EXPECT_EQ(s.profiles[1].name, "med");
  EXPECT_NEAR(s.profiles[1].per_intercept_error, 0.25, 1e-8);
  EXPECT_NEAR(s.profiles[2].per_intercept_error, oracle::kCloneBer, 1e-7);
  EXPECT_NEAR(s.profiles[2].per_attacked_bit_collision, *s.cloning_med.collision_probability, 0);
  for (const auto& p : s.profiles) EXPECT_NO_THROW(p.validate());
}
