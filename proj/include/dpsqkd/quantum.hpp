#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dpsqkd {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Tolerance ladder shared by every module.
inline constexpr double kAlgebraicTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdSlack = 1e-9;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitian : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pure state vector in a finite mode basis.
class Ket {
 public:
  Ket() = default;
  explicit Ket(CVector amplitudes);
  Ket(std::initializer_list<Complex> amplitudes);

  static Ket basis(int dim, int index);

  int dim() const { return static_cast<int>(amp_.size()); }
  const CVector& amplitudes() const { return amp_; }
  Complex operator[](int i) const { return amp_(i); }

  double norm() const { return amp_.norm(); }
  Ket normalized() const;
  Ket conjugate() const;
  /// <this|other>
  Complex inner(const Ket& other) const;

 private:
  CVector amp_;
};

/// Dense Hermitian operator. Construction checks Hermiticity and stores the
/// exactly symmetrized matrix (A + A^dagger) / 2.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const CMatrix& m, double tol = kAlgebraicTol);

  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);
  static HermitianOperator projector(const Ket& k);
  static HermitianOperator from_real(const Eigen::MatrixXd& m,
                                     double tol = kAlgebraicTol);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }
  /// Tr(A B) for Hermitian A, B (real).
  double hs_inner(const HermitianOperator& other) const;
  /// <k|A|k>
  double expectation(const Ket& k) const;
  double frobenius_distance(const HermitianOperator& other) const;
  double min_eigenvalue() const;
  bool is_real(double tol = kAlgebraicTol) const;
  bool is_psd(double slack = kPsdSlack) const;
  bool is_density(double trace_tol = kTraceTol,
                  double slack = kPsdSlack) const;

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  HermitianOperator& operator+=(const HermitianOperator& o);
  /// U A U^dagger
  HermitianOperator conjugated_by(const CMatrix& u) const;

 private:
  CMatrix m_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& a) {
  return a * s;
}

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // descending
  std::vector<Ket> eigenvectors;    // orthonormal, same order

  HermitianOperator reconstruct() const;
};

/// Kronecker product, first operand is the most significant subsystem.
Ket tensor(const Ket& a, const Ket& b);
HermitianOperator tensor(const HermitianOperator& a,
                         const HermitianOperator& b);

/// Trace out every subsystem not listed in `keep`. Kept subsystems stay in
/// their original order.
HermitianOperator partial_trace(const HermitianOperator& x,
                                std::span<const int> dims,
                                std::span<const int> keep);
HermitianOperator partial_trace(const HermitianOperator& x,
                                std::initializer_list<int> dims,
                                std::initializer_list<int> keep);

/// Eigendecomposition by cyclic Jacobi rotations. Degenerate eigenspaces come
/// back as an arbitrary orthonormal basis.
SpectralDecomposition eig_hermitian(const HermitianOperator& h);

/// <psi|rho|psi>
double fidelity_pure(const Ket& psi, const HermitianOperator& rho);

namespace detail {

struct RealEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns
};

/// Cyclic Jacobi on a real symmetric matrix.
RealEigen jacobi_symmetric(const Eigen::MatrixXd& a, int max_sweeps = 100);

}  // namespace detail

}  // namespace dpsqkd
