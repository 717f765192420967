#include <cmath>

#include <Eigen/Eigenvalues>

#include "dpsqkd/sdp.hpp"

namespace dpsqkd {

int SdpProblem::add_block(std::string name, int dim) {
  if (dim <= 0) throw DimensionMismatch("add_block: dimension must be positive");
  blocks_.push_back({std::move(name), dim});
  objective_.push_back(HermitianOperator::zero(dim));
  return static_cast<int>(blocks_.size()) - 1;
}

void SdpProblem::check_block(int b, const HermitianOperator& op) const {
  if (b < 0 || b >= num_blocks()) throw DimensionMismatch("SdpProblem: block index out of range");
  if (op.dim() != blocks_[b].dim) {
    throw DimensionMismatch("SdpProblem: operator dimension does not match block '" +
                            blocks_[b].name + "'");
  }
}

void SdpProblem::set_objective(int block, HermitianOperator cost) {
  check_block(block, cost);
  objective_[block] = std::move(cost);
}

void SdpProblem::add_constraint(std::vector<Term> terms, double rhs, std::string label) {
  for (const auto& t : terms) check_block(t.block, t.coeff);
  constraints_.push_back({std::move(terms), rhs, std::move(label)});
}

double SdpProblem::objective_value(const std::vector<HermitianOperator>& x) const {
  if (static_cast<int>(x.size()) != num_blocks()) {
    throw DimensionMismatch("objective_value: block count mismatch");
  }
  double v = 0.0;
  for (int b = 0; b < num_blocks(); ++b) v += objective_[b].hs_inner(x[b]);
  return v;
}

std::vector<double> SdpProblem::constraint_residuals(const std::vector<HermitianOperator>& x) const {
  if (static_cast<int>(x.size()) != num_blocks()) {
    throw DimensionMismatch("constraint_residuals: block count mismatch");
  }
  std::vector<double> r;
  r.reserve(constraints_.size());
  for (const auto& c : constraints_) {
    double v = -c.rhs;
    for (const auto& t : c.terms) v += t.coeff.hs_inner(x[t.block]);
    r.push_back(v);
  }
  return r;
}

std::vector<HermitianOperator> SdpProblem::dual_slack(const std::vector<double>& y) const {
  if (static_cast<int>(y.size()) != num_constraints()) {
    throw DimensionMismatch("dual_slack: multiplier count mismatch");
  }
  std::vector<HermitianOperator> z;
  z.reserve(blocks_.size());
  for (int b = 0; b < num_blocks(); ++b) z.push_back(objective_[b] * -1.0);
  for (size_t j = 0; j < constraints_.size(); ++j) {
    for (const auto& t : constraints_[j].terms) z[t.block] += t.coeff * y[j];
  }
  return z;
}

void SdpProblem::check_constraint_rank() const {
  const int m = num_constraints();
  if (m == 0) return;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      double g = 0.0;
      for (const auto& ti : constraints_[i].terms) {
        for (const auto& tj : constraints_[j].terms) {
          if (ti.block == tj.block) g += ti.coeff.hs_inner(tj.coeff);
        }
      }
      gram(i, j) = g;
      gram(j, i) = g;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (lmax <= 0.0 || lmin <= 1e-12 * lmax) {
    throw SolverError(SolverStatus::InfeasibleConstraints,
                      "constraint rows are linearly dependent (Gram eigenvalue ratio " +
                          std::to_string(lmax > 0 ? lmin / lmax : 0.0) + ")");
  }
}

// ------------------------------------------------------------- builders

namespace {

// Real-part selector for entry (k, l): Tr(A X) = Re X_kl.
CMatrix real_selector(int dim, int k, int l) {
  CMatrix a = CMatrix::Zero(dim, dim);
  if (k == l) {
    a(k, k) = 1.0;
  } else {
    a(k, l) = 0.5;
    a(l, k) = 0.5;
  }
  return a;
}

// Imaginary-part selector for k < l: Tr(A X) = Im X_kl.
CMatrix imag_selector(int dim, int k, int l) {
  CMatrix a = CMatrix::Zero(dim, dim);
  a(k, l) = Complex(0.0, 0.5);
  a(l, k) = Complex(0.0, -0.5);
  return a;
}

CMatrix embed_on_subsystem(const CMatrix& local, const std::vector<int>& dims, int kept) {
  int before = 1;
  int after = 1;
  for (int s = 0; s < kept; ++s) before *= dims[s];
  for (size_t s = static_cast<size_t>(kept) + 1; s < dims.size(); ++s) after *= dims[s];
  const int d = dims[kept];
  const int total = before * d * after;
  CMatrix out = CMatrix::Zero(total, total);
  for (int p = 0; p < before; ++p) {
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) {
        if (local(k, l) == Complex(0.0)) continue;
        for (int q = 0; q < after; ++q) {
          out((p * d + k) * after + q, (p * d + l) * after + q) = local(k, l);
        }
      }
    }
  }
  return out;
}

}  // namespace

void add_sum_to_identity(SdpProblem& problem, const std::vector<int>& blocks, int dim) {
  for (int k = 0; k < dim; ++k) {
    for (int l = k; l < dim; ++l) {
      const HermitianOperator re(real_selector(dim, k, l));
      std::vector<SdpProblem::Term> terms;
      for (int b : blocks) terms.push_back({b, re});
      problem.add_constraint(std::move(terms), k == l ? 1.0 : 0.0,
                             "sum=I re(" + std::to_string(k) + "," + std::to_string(l) + ")");
      if (k == l) continue;
      const HermitianOperator im(imag_selector(dim, k, l));
      terms.clear();
      for (int b : blocks) terms.push_back({b, im});
      problem.add_constraint(std::move(terms), 0.0,
                             "sum=I im(" + std::to_string(k) + "," + std::to_string(l) + ")");
    }
  }
}

void add_partial_trace_identity(SdpProblem& problem, int block, const std::vector<int>& dims,
                                int kept) {
  if (kept < 0 || kept >= static_cast<int>(dims.size())) {
    throw DimensionMismatch("add_partial_trace_identity: kept subsystem out of range");
  }
  long total = 1;
  for (int d : dims) total *= d;
  if (total != problem.block(block).dim) {
    throw DimensionMismatch("add_partial_trace_identity: dims do not match block dimension");
  }
  const int d = dims[kept];
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) {
      problem.add_constraint({{block, HermitianOperator(embed_on_subsystem(
                                          real_selector(d, k, l), dims, kept))}},
                             k == l ? 1.0 : 0.0,
                             "ptrace=I re(" + std::to_string(k) + "," + std::to_string(l) + ")");
      if (k == l) continue;
      problem.add_constraint({{block, HermitianOperator(embed_on_subsystem(
                                          imag_selector(d, k, l), dims, kept))}},
                             0.0,
                             "ptrace=I im(" + std::to_string(k) + "," + std::to_string(l) + ")");
    }
  }
}

}  // namespace dpsqkd
