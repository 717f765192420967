#include <gtest/gtest.h>

#include <random>

#include "dpsqkd/quantum.hpp"

using namespace dpsqkd;

namespace {

CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

HermitianOperator random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return HermitianOperator(CMatrix((rho + rho.adjoint()) / 2.0));
}

}  // namespace

TEST(Ket, BasisNormAndInner) {
  const Ket e0 = Ket::basis(3, 0);
  const Ket e2 = Ket::basis(3, 2);
  EXPECT_DOUBLE_EQ(e0.norm(), 1.0);
  EXPECT_EQ(e0.inner(e2), Complex(0.0));
  const Ket psi{Complex(1, 1), Complex(0, 2)};
  EXPECT_NEAR(psi.normalized().norm(), 1.0, 1e-15);
  EXPECT_EQ(psi.conjugate()[0], Complex(1, -1));
  EXPECT_THROW(Ket::basis(3, 3), DimensionMismatch);
}

TEST(Ket, InnerIsConjugateLinearInFirstArgument) {
  const Ket a{Complex(0, 1), Complex(1, 0)};
  const Ket b{Complex(1, 0), Complex(0, 0)};
  EXPECT_EQ(a.inner(b), Complex(0, -1));
  EXPECT_THROW(a.inner(Ket::basis(3, 0)), DimensionMismatch);
}

TEST(HermitianOperator, RejectsNonHermitianInput) {
  CMatrix m(2, 2);
  m << 1, 2, 3, 4;
  EXPECT_THROW(HermitianOperator{m}, NotHermitian);
  CMatrix ok(2, 2);
  ok << 1, Complex(0, 1), Complex(0, -1), 2;
  EXPECT_NO_THROW(HermitianOperator{ok});
  EXPECT_THROW(HermitianOperator{CMatrix(2, 3)}, DimensionMismatch);
}

TEST(HermitianOperator, ArithmeticAndChecks) {
  const auto id = HermitianOperator::identity(3);
  EXPECT_DOUBLE_EQ(id.trace(), 3.0);
  EXPECT_TRUE(id.is_psd());
  EXPECT_FALSE(id.is_density());
  EXPECT_TRUE((id * (1.0 / 3.0)).is_density());
  const auto p = HermitianOperator::projector(Ket::basis(3, 1));
  EXPECT_DOUBLE_EQ(p.hs_inner(id), 1.0);
  EXPECT_DOUBLE_EQ((id - p).min_eigenvalue(), 0.0);
  EXPECT_NEAR((p - id).min_eigenvalue(), -1.0, 1e-14);
  EXPECT_FALSE((p - id).is_psd());
  EXPECT_TRUE(p.is_real());
  EXPECT_THROW(id + HermitianOperator::identity(2), DimensionMismatch);
}

TEST(HermitianOperator, ConjugationPreservesSpectrum) {
  std::mt19937_64 rng(11);
  const HermitianOperator h(random_hermitian(4, rng));
  const Eigen::HouseholderQR<CMatrix> qr(random_hermitian(4, rng) + CMatrix::Identity(4, 4) * Complex(0, 1));
  const CMatrix u = qr.householderQ();
  const auto a = eig_hermitian(h);
  const auto b = eig_hermitian(h.conjugated_by(u));
  for (size_t i = 0; i < a.eigenvalues.size(); ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-10);
}

TEST(Tensor, KroneckerOrderingAndPartialTrace) {
  const Ket a = Ket::basis(2, 1);
  const Ket b = Ket::basis(3, 2);
  const Ket ab = tensor(a, b);
  EXPECT_EQ(ab.dim(), 6);
  EXPECT_EQ(ab[1 * 3 + 2], Complex(1.0));

  std::mt19937_64 rng(3);
  const auto ra = random_density(2, rng);
  const auto rb = random_density(3, rng);
  const auto rc = random_density(2, rng);
  const auto abc = tensor(tensor(ra, rb), rc);
  const std::vector<int> dims = {2, 3, 2};
  EXPECT_LT(partial_trace(abc, dims, std::vector<int>{0}).frobenius_distance(ra), 1e-13);
  EXPECT_LT(partial_trace(abc, dims, std::vector<int>{1}).frobenius_distance(rb), 1e-13);
  EXPECT_LT(partial_trace(abc, dims, std::vector<int>{2}).frobenius_distance(rc), 1e-13);
  EXPECT_LT(partial_trace(abc, dims, std::vector<int>{0, 2}).frobenius_distance(tensor(ra, rc)), 1e-13);
  EXPECT_THROW(partial_trace(abc, {2, 2, 2}, {0}), DimensionMismatch);
}

TEST(Tensor, PartialTracePreservesTraceAndPositivity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = random_density(12, rng);
    const auto red = partial_trace(rho, {3, 4}, {1});
    EXPECT_NEAR(red.trace(), 1.0, 1e-12);
    EXPECT_TRUE(red.is_density(1e-10, 1e-10));
  }
}

TEST(EigHermitian, MatchesReferenceSolverOnRandomMatrices) {
  std::mt19937_64 rng(42);
  for (int d : {1, 2, 3, 5, 8, 12}) {
    for (int trial = 0; trial < 10; ++trial) {
      const CMatrix m = random_hermitian(d, rng);
      const auto spec = eig_hermitian(HermitianOperator(m));
      Eigen::SelfAdjointEigenSolver<CMatrix> ref(m);
      for (int i = 0; i < d; ++i) {
        EXPECT_NEAR(spec.eigenvalues[i], ref.eigenvalues()(d - 1 - i), 1e-10 * (1 + m.norm()));
      }
      EXPECT_LT((spec.reconstruct().matrix() - m).norm(), 1e-10 * (1 + m.norm()));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          EXPECT_NEAR(std::abs(spec.eigenvectors[i].inner(spec.eigenvectors[j])), i == j ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(EigHermitian, DegenerateComplexSpectrum) {
  // A rank-one complex projector in dimension 4 has a threefold zero eigenvalue.
  const Ket psi = Ket{Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)}.normalized();
  const auto p = HermitianOperator::projector(psi);
  const auto spec = eig_hermitian(p);
  EXPECT_NEAR(spec.eigenvalues[0], 1.0, 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(spec.eigenvalues[i], 0.0, 1e-12);
  EXPECT_LT(spec.reconstruct().frobenius_distance(p), 1e-12);
  EXPECT_NEAR(std::abs(spec.eigenvectors[0].inner(psi)), 1.0, 1e-12);
}

TEST(EigHermitian, DiagonalAndIdentity) {
  const auto spec = eig_hermitian(HermitianOperator::identity(5));
  for (double v : spec.eigenvalues) EXPECT_DOUBLE_EQ(v, 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << 0.2, -1.0, 3.0;
  const auto s = eig_hermitian(HermitianOperator::from_real(d));
  EXPECT_DOUBLE_EQ(s.eigenvalues[0], 3.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[2], -1.0);
}

TEST(FidelityPure, ProjectorOverlap) {
  const Ket plus = Ket{1.0, 1.0}.normalized();
  EXPECT_NEAR(fidelity_pure(plus, HermitianOperator::projector(Ket::basis(2, 0))), 0.5, 1e-15);
  EXPECT_NEAR(fidelity_pure(plus, HermitianOperator::projector(plus)), 1.0, 1e-15);
}
