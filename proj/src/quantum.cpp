#include "dpsqkd/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dpsqkd {

// ---------------------------------------------------------------- Ket

Ket::Ket(CVector amplitudes) : amp_(std::move(amplitudes)) {
  if (amp_.size() == 0) throw DimensionMismatch("Ket: empty amplitude vector");
}

Ket::Ket(std::initializer_list<Complex> amplitudes)
    : amp_(static_cast<Eigen::Index>(amplitudes.size())) {
  if (amplitudes.size() == 0) throw DimensionMismatch("Ket: empty amplitude vector");
  Eigen::Index i = 0;
  for (const auto& a : amplitudes) amp_(i++) = a;
}

Ket Ket::basis(int dim, int index) {
  if (dim <= 0 || index < 0 || index >= dim) {
    throw DimensionMismatch("Ket::basis: index out of range");
  }
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return Ket(std::move(v));
}

Ket Ket::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("Ket::normalized: zero vector");
  return Ket(amp_ / n);
}

Ket Ket::conjugate() const { return Ket(amp_.conjugate()); }

Complex Ket::inner(const Ket& other) const {
  if (dim() != other.dim()) throw DimensionMismatch("Ket::inner: dimension mismatch");
  return amp_.dot(other.amp_);  // Eigen's dot conjugates the left operand
}

// ---------------------------------------------------- HermitianOperator

HermitianOperator::HermitianOperator(const CMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch("HermitianOperator: matrix must be square and non-empty");
  }
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (dev > tol * scale) {
    throw NotHermitian("HermitianOperator: deviation " + std::to_string(dev) +
                       " exceeds tolerance");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(CMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::projector(const Ket& k) {
  return HermitianOperator(k.amplitudes() * k.amplitudes().adjoint());
}

HermitianOperator HermitianOperator::from_real(const Eigen::MatrixXd& m, double tol) {
  return HermitianOperator(m.cast<Complex>(), tol);
}

double HermitianOperator::hs_inner(const HermitianOperator& other) const {
  if (dim() != other.dim()) throw DimensionMismatch("hs_inner: dimension mismatch");
  // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (m_.array() * other.m_.conjugate().array()).sum().real();
}

double HermitianOperator::expectation(const Ket& k) const {
  if (dim() != k.dim()) throw DimensionMismatch("expectation: dimension mismatch");
  return k.amplitudes().dot(m_ * k.amplitudes()).real();
}

double HermitianOperator::frobenius_distance(const HermitianOperator& other) const {
  if (dim() != other.dim()) throw DimensionMismatch("frobenius_distance: dimension mismatch");
  return (m_ - other.m_).norm();
}

double HermitianOperator::min_eigenvalue() const {
  return eig_hermitian(*this).eigenvalues.back();
}

bool HermitianOperator::is_real(double tol) const {
  return m_.imag().cwiseAbs().maxCoeff() <= tol;
}

bool HermitianOperator::is_psd(double slack) const { return min_eigenvalue() >= -slack; }

bool HermitianOperator::is_density(double trace_tol, double slack) const {
  return std::abs(trace() - 1.0) <= trace_tol && is_psd(slack);
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("operator+: dimension mismatch");
  HermitianOperator r;
  r.m_ = m_ + o.m_;
  return r;
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("operator-: dimension mismatch");
  HermitianOperator r;
  r.m_ = m_ - o.m_;
  return r;
}

HermitianOperator HermitianOperator::operator*(double s) const {
  HermitianOperator r;
  r.m_ = m_ * s;
  return r;
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  if (dim() != o.dim()) throw DimensionMismatch("operator+=: dimension mismatch");
  m_ += o.m_;
  return *this;
}

HermitianOperator HermitianOperator::conjugated_by(const CMatrix& u) const {
  if (u.rows() != dim() || u.cols() != dim()) {
    throw DimensionMismatch("conjugated_by: dimension mismatch");
  }
  return HermitianOperator(u * m_ * u.adjoint(), 1e-10);
}

HermitianOperator SpectralDecomposition::reconstruct() const {
  if (eigenvectors.empty()) throw DimensionMismatch("reconstruct: empty decomposition");
  const int d = eigenvectors.front().dim();
  CMatrix m = CMatrix::Zero(d, d);
  for (size_t k = 0; k < eigenvalues.size(); ++k) {
    const auto& v = eigenvectors[k].amplitudes();
    m += eigenvalues[k] * v * v.adjoint();
  }
  return HermitianOperator(m, 1e-9);
}

// ------------------------------------------------------------ tensor

Ket tensor(const Ket& a, const Ket& b) {
  CVector out(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i) {
    out.segment(static_cast<Eigen::Index>(i) * b.dim(), b.dim()) = a[i] * b.amplitudes();
  }
  return Ket(std::move(out));
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  const int da = a.dim();
  const int db = b.dim();
  CMatrix out(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
    }
  }
  return HermitianOperator(out);
}

// ------------------------------------------------------ partial trace

HermitianOperator partial_trace(const HermitianOperator& x, std::span<const int> dims,
                                std::span<const int> keep) {
  const int nsys = static_cast<int>(dims.size());
  long total = 1;
  for (int d : dims) {
    if (d <= 0) throw DimensionMismatch("partial_trace: non-positive subsystem dimension");
    total *= d;
  }
  if (total != x.dim()) {
    throw DimensionMismatch("partial_trace: product of dims " + std::to_string(total) +
                            " != operator dimension " + std::to_string(x.dim()));
  }
  std::vector<bool> kept(static_cast<size_t>(nsys), false);
  for (int k : keep) {
    if (k < 0 || k >= nsys) throw DimensionMismatch("partial_trace: keep index out of range");
    kept[static_cast<size_t>(k)] = true;
  }

  // Row-major strides: subsystem 0 is the most significant digit.
  std::vector<long> stride(static_cast<size_t>(nsys), 1);
  for (int s = nsys - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  int kept_dim = 1;
  for (int s = 0; s < nsys; ++s) {
    if (kept[s]) kept_dim *= dims[s];
  }

  // Split each full index into (kept index, traced index).
  std::vector<int> kept_index(static_cast<size_t>(total));
  std::vector<int> traced_index(static_cast<size_t>(total));
  for (long i = 0; i < total; ++i) {
    int ki = 0;
    int ti = 0;
    for (int s = 0; s < nsys; ++s) {
      const int digit = static_cast<int>((i / stride[s]) % dims[s]);
      if (kept[s]) {
        ki = ki * dims[s] + digit;
      } else {
        ti = ti * dims[s] + digit;
      }
    }
    kept_index[i] = ki;
    traced_index[i] = ti;
  }

  CMatrix out = CMatrix::Zero(kept_dim, kept_dim);
  const CMatrix& m = x.matrix();
  for (long i = 0; i < total; ++i) {
    for (long j = 0; j < total; ++j) {
      if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += m(i, j);
    }
  }
  return HermitianOperator(out, 1e-10);
}

HermitianOperator partial_trace(const HermitianOperator& x, std::initializer_list<int> dims,
                                std::initializer_list<int> keep) {
  return partial_trace(x, std::span<const int>(dims.begin(), dims.size()),
                       std::span<const int>(keep.begin(), keep.size()));
}

// ----------------------------------------------------- eigensolver

SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
  const int d = h.dim();
  SpectralDecomposition out;

  if (h.is_real(0.0)) {
    const auto re = detail::jacobi_symmetric(h.matrix().real());
    for (int k = 0; k < d; ++k) {
      out.eigenvalues.push_back(re.values(k));
      out.eigenvectors.emplace_back(re.vectors.col(k).cast<Complex>().eval());
    }
    return out;
  }

  // Real symmetric embedding [[A, -B], [B, A]] of H = A + iB. Each eigenvalue
  // of H appears twice, with real eigenvectors (x, y) and (-y, x) that both
  // map onto the complex eigenvector x + iy (up to a phase).
  Eigen::MatrixXd emb(2 * d, 2 * d);
  const Eigen::MatrixXd a = h.matrix().real();
  const Eigen::MatrixXd b = h.matrix().imag();
  emb << a, -b, b, a;
  const auto re = detail::jacobi_symmetric(emb);

  const double scale = std::max(1.0, std::abs(re.values(0)));
  std::vector<CVector> chosen;
  std::vector<bool> used(static_cast<size_t>(2 * d), false);

  auto residual_of = [&](int col) {
    CVector v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(re.vectors(i, col), re.vectors(d + i, col));
    for (const auto& c : chosen) v -= c * c.dot(v);
    return v;
  };

  // Walk eigenvalue clusters; within a cluster of real multiplicity m pick
  // m/2 complex vectors, greedily by largest residual after projection.
  int start = 0;
  while (start < 2 * d && static_cast<int>(chosen.size()) < d) {
    int end = start + 1;
    while (end < 2 * d && std::abs(re.values(end) - re.values(start)) <= 1e-9 * scale) ++end;
    const int want = std::max(1, (end - start) / 2);
    for (int picked = 0; picked < want && static_cast<int>(chosen.size()) < d; ++picked) {
      int best = -1;
      double best_norm = 0.0;
      CVector best_vec;
      for (int col = start; col < end; ++col) {
        if (used[col]) continue;
        CVector r = residual_of(col);
        if (r.norm() > best_norm) {
          best_norm = r.norm();
          best = col;
          best_vec = std::move(r);
        }
      }
      if (best < 0 || best_norm < 1e-6) break;
      used[best] = true;
      chosen.push_back(best_vec / best_norm);
    }
    start = end;
  }
  // Clusters split by rounding can leave gaps; fill from whatever remains.
  while (static_cast<int>(chosen.size()) < d) {
    int best = -1;
    double best_norm = 0.0;
    CVector best_vec;
    for (int col = 0; col < 2 * d; ++col) {
      if (used[col]) continue;
      CVector r = residual_of(col);
      if (r.norm() > best_norm) {
        best_norm = r.norm();
        best = col;
        best_vec = std::move(r);
      }
    }
    if (best < 0 || best_norm < 1e-8) {
      throw std::runtime_error("eig_hermitian: failed to recover complex eigenbasis");
    }
    used[best] = true;
    chosen.push_back(best_vec / best_norm);
  }

  std::vector<std::pair<double, CVector>> pairs;
  for (auto& v : chosen) {
    const double lambda = v.dot(h.matrix() * v).real();
    pairs.emplace_back(lambda, std::move(v));
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (auto& [lambda, v] : pairs) {
    out.eigenvalues.push_back(lambda);
    out.eigenvectors.emplace_back(std::move(v));
  }
  return out;
}

double fidelity_pure(const Ket& psi, const HermitianOperator& rho) {
  if (psi.dim() != rho.dim()) throw DimensionMismatch("fidelity_pure: dimension mismatch");
  return rho.expectation(psi);
}

}  // namespace dpsqkd
