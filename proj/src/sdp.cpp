#include "dpsqkd/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include "json.hpp"

namespace dpsqkd {

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::MaxIterations:
      return "MaxIterations";
    case SolverStatus::NumericalBreakdown:
      return "NumericalBreakdown";
    case SolverStatus::InfeasibleConstraints:
      return "InfeasibleConstraints";
  }
  return "Unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Internal minimization form over real symmetric blocks:
//   min <C, X>  s.t.  <A_j, X> = b_j,  X >= 0
//   max b.y     s.t.  sum_j y_j A_j + Z = C,  Z >= 0
struct RealProblem {
  std::vector<int> size;
  std::vector<MatrixXd> cost;
  struct Term {
    int block;
    MatrixXd coeff;
  };
  std::vector<std::vector<Term>> rows;
  VectorXd rhs;
  std::vector<int> source;  // original constraint index of each row
  bool complex_embedding = false;
};

bool negligible(const MatrixXd& m, double tol = 1e-14) {
  return m.size() == 0 || m.cwiseAbs().maxCoeff() <= tol;
}

// [[Re, -Im], [Im, Re]] / 2 so that <emb(A)/2, emb(X)> = Tr(A X).
MatrixXd half_embedding(const CMatrix& m) {
  const auto d = m.rows();
  MatrixXd out(2 * d, 2 * d);
  out << m.real(), -m.imag(), m.imag(), m.real();
  return 0.5 * out;
}

bool needs_complex(const SdpProblem& p) {
  for (int b = 0; b < p.num_blocks(); ++b) {
    if (!negligible(p.objective(b).matrix().imag())) return true;
  }
  for (const auto& c : p.constraints()) {
    bool any_real = false;
    bool any_imag = false;
    for (const auto& t : c.terms) {
      any_real = any_real || !negligible(t.coeff.matrix().real());
      any_imag = any_imag || !negligible(t.coeff.matrix().imag());
    }
    if (any_real && any_imag) return true;
    // A purely imaginary row vanishes on real X; only harmless when r_j = 0.
    if (any_imag && std::abs(c.rhs) > 0.0) return true;
  }
  return false;
}

RealProblem lower(const SdpProblem& p) {
  RealProblem rp;
  rp.complex_embedding = needs_complex(p);
  for (int b = 0; b < p.num_blocks(); ++b) {
    const CMatrix& c = p.objective(b).matrix();
    if (rp.complex_embedding) {
      rp.size.push_back(2 * p.block(b).dim);
      rp.cost.push_back(-half_embedding(c));
    } else {
      rp.size.push_back(p.block(b).dim);
      rp.cost.push_back(-c.real());
    }
  }
  std::vector<double> rhs;
  for (int j = 0; j < p.num_constraints(); ++j) {
    const auto& c = p.constraints()[j];
    std::vector<RealProblem::Term> row;
    for (const auto& t : c.terms) {
      if (rp.complex_embedding) {
        row.push_back({t.block, half_embedding(t.coeff.matrix())});
      } else if (!negligible(t.coeff.matrix().real())) {
        row.push_back({t.block, t.coeff.matrix().real()});
      }
    }
    if (row.empty()) continue;  // imaginary-part row, trivially satisfied by real X
    rp.rows.push_back(std::move(row));
    rhs.push_back(c.rhs);
    rp.source.push_back(j);
  }
  rp.rhs = Eigen::Map<VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return rp;
}

using Blocks = std::vector<MatrixXd>;

double inner(const Blocks& x, const Blocks& y) {
  double s = 0.0;
  for (size_t b = 0; b < x.size(); ++b) s += (x[b].array() * y[b].array()).sum();
  return s;
}

double norm(const Blocks& x) { return std::sqrt(inner(x, x)); }

VectorXd apply_a(const RealProblem& p, const Blocks& x) {
  VectorXd out(static_cast<Eigen::Index>(p.rows.size()));
  for (size_t j = 0; j < p.rows.size(); ++j) {
    double s = 0.0;
    for (const auto& t : p.rows[j]) s += (t.coeff.array() * x[t.block].array()).sum();
    out(static_cast<Eigen::Index>(j)) = s;
  }
  return out;
}

Blocks apply_a_adjoint(const RealProblem& p, const VectorXd& y) {
  Blocks out;
  for (int n : p.size) out.push_back(MatrixXd::Zero(n, n));
  for (size_t j = 0; j < p.rows.size(); ++j) {
    for (const auto& t : p.rows[j]) out[t.block] += y(static_cast<Eigen::Index>(j)) * t.coeff;
  }
  return out;
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with x + alpha * dx >= 0 (infinity when unbounded).
double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) {
    throw SolverError(SolverStatus::NumericalBreakdown, "iterate lost positive definiteness");
  }
  const MatrixXd linv_dx = llt.matrixL().solve(dx);
  const MatrixXd t = llt.matrixL().solve(linv_dx.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(t), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

// Nesterov-Todd scaling W with W Z W = X, built from Cholesky factors and an
// SVD (Todd, Toh and Tutuncu).
MatrixXd nt_scaling(const MatrixXd& x, const MatrixXd& z) {
  Eigen::LLT<MatrixXd> lx(x);
  Eigen::LLT<MatrixXd> lz(z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
    throw SolverError(SolverStatus::NumericalBreakdown, "Cholesky of iterate failed");
  }
  const MatrixXd l = lx.matrixL();
  const MatrixXd r = lz.matrixL();
  Eigen::JacobiSVD<MatrixXd> svd(r.transpose() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd s = svd.singularValues();
  if (s.minCoeff() <= 0.0) {
    throw SolverError(SolverStatus::NumericalBreakdown, "degenerate NT scaling");
  }
  const MatrixXd g = l * svd.matrixV() * s.cwiseSqrt().cwiseInverse().asDiagonal();
  return g * g.transpose();
}

struct Direction {
  Blocks dx;
  VectorXd dy;
  Blocks dz;
};

struct Iterate {
  Blocks x;
  VectorXd y;
  Blocks z;
};

class InteriorPoint {
 public:
  InteriorPoint(const RealProblem& p, const SdpOptions& o) : p_(p), opt_(o) {
    total_dim_ = 0;
    for (int n : p_.size) total_dim_ += n;
  }

  Iterate run(int& iterations) {
    Iterate it;
    const double start = 1.0 + (p_.rhs.size() ? p_.rhs.cwiseAbs().maxCoeff() : 0.0);
    for (int n : p_.size) {
      it.x.push_back(start * MatrixXd::Identity(n, n));
      it.z.push_back(MatrixXd::Identity(n, n));
    }
    it.y = VectorXd::Zero(static_cast<Eigen::Index>(p_.rows.size()));

    const double b_norm = p_.rhs.norm();
    const double c_norm = norm(p_.cost);

    for (iterations = 0; iterations <= opt_.max_iterations; ++iterations) {
      const VectorXd rp = p_.rhs - apply_a(p_, it.x);
      Blocks rd = apply_a_adjoint(p_, it.y);
      for (size_t b = 0; b < rd.size(); ++b) rd[b] = p_.cost[b] - it.z[b] - rd[b];

      const double xz = inner(it.x, it.z);
      const double mu = xz / total_dim_;
      const double pobj = inner(p_.cost, it.x);
      const double dobj = p_.rhs.dot(it.y);
      const double pinf = rp.norm() / (1.0 + b_norm);
      const double dinf = norm(rd) / (1.0 + c_norm);
      const double scale = 1.0 + std::abs(pobj);

      if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) {
        throw SolverError(SolverStatus::NumericalBreakdown, "non-finite iterate");
      }
      if (pinf <= opt_.feasibility_tolerance && dinf <= opt_.feasibility_tolerance &&
          xz <= opt_.gap_tolerance * scale && std::abs(pobj - dobj) <= opt_.gap_tolerance * scale) {
        return it;
      }
      if (iterations == opt_.max_iterations) break;

      std::vector<MatrixXd> w;
      w.reserve(p_.size.size());
      for (size_t b = 0; b < p_.size.size(); ++b) w.push_back(nt_scaling(it.x[b], it.z[b]));
      factorize_schur(w);

      double sigma = opt_.centering;
      if (opt_.predictor_corrector) {
        const Direction aff = direction(it, rp, rd, w, 0.0, mu);
        const double ap = step_length(it.x, aff.dx);
        const double ad = step_length(it.z, aff.dz);
        Blocks xa = it.x;
        Blocks za = it.z;
        for (size_t b = 0; b < xa.size(); ++b) {
          xa[b] += ap * aff.dx[b];
          za[b] += ad * aff.dz[b];
        }
        const double mu_aff = inner(xa, za) / total_dim_;
        sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
      }

      const Direction d = direction(it, rp, rd, w, sigma, mu);
      const double alpha_p = step_length(it.x, d.dx);
      const double alpha_d = step_length(it.z, d.dz);
      for (size_t b = 0; b < it.x.size(); ++b) {
        it.x[b] = sym(it.x[b] + alpha_p * d.dx[b]);
        it.z[b] = sym(it.z[b] + alpha_d * d.dz[b]);
      }
      it.y += alpha_d * d.dy;

      if (opt_.trace) {
        nlohmann::json line = {{"iteration", iterations},
                               {"primal_objective", -pobj},
                               {"dual_objective", -dobj},
                               {"gap", std::abs(pobj - dobj)},
                               {"mu", mu},
                               {"primal_infeasibility", pinf},
                               {"dual_infeasibility", dinf},
                               {"sigma", sigma},
                               {"primal_step", alpha_p},
                               {"dual_step", alpha_d}};
        *opt_.trace << line.dump() << '\n';
      }
    }
    throw SolverError(SolverStatus::MaxIterations,
                      "no convergence after " + std::to_string(opt_.max_iterations) + " iterations");
  }

 private:
  double step_length(const Blocks& x, const Blocks& dx) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < x.size(); ++b) alpha = std::min(alpha, max_step(x[b], dx[b]));
    return std::min(1.0, opt_.step_fraction * alpha);
  }

  void factorize_schur(const std::vector<MatrixXd>& w) {
    const auto m = static_cast<Eigen::Index>(p_.rows.size());
    // W A_j W for each row term.
    wa_w_.assign(p_.rows.size(), {});
    for (size_t j = 0; j < p_.rows.size(); ++j) {
      for (const auto& t : p_.rows[j]) wa_w_[j].push_back(w[t.block] * t.coeff * w[t.block]);
    }
    MatrixXd schur = MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        double s = 0.0;
        for (const auto& ti : p_.rows[i]) {
          const auto& row_j = p_.rows[j];
          for (size_t k = 0; k < row_j.size(); ++k) {
            if (row_j[k].block != ti.block) continue;
            s += (ti.coeff.array() * wa_w_[j][k].array()).sum();
          }
        }
        schur(i, j) = s;
        schur(j, i) = s;
      }
    }
    schur_ = schur.ldlt();
    if (schur_.info() != Eigen::Success || !schur_.isPositive()) {
      throw SolverError(SolverStatus::NumericalBreakdown, "Schur complement is not positive definite");
    }
    w_ = w;
  }

  Direction direction(const Iterate& it, const VectorXd& rp, const Blocks& rd,
                      const std::vector<MatrixXd>& w, double sigma, double mu) const {
    Blocks rc;
    Blocks w_rd_w;
    for (size_t b = 0; b < it.x.size(); ++b) {
      Eigen::LLT<MatrixXd> lz(it.z[b]);
      const MatrixXd zinv = lz.solve(MatrixXd::Identity(p_.size[b], p_.size[b]));
      rc.push_back(sigma * mu * zinv - it.x[b]);
      w_rd_w.push_back(w[b] * rd[b] * w[b]);
    }
    const VectorXd rhs = rp - apply_a(p_, rc) + apply_a(p_, w_rd_w);
    Direction d;
    d.dy = schur_.solve(rhs);
    if (!d.dy.allFinite()) {
      throw SolverError(SolverStatus::NumericalBreakdown, "non-finite Newton step");
    }
    const Blocks a_dy = apply_a_adjoint(p_, d.dy);
    for (size_t b = 0; b < it.x.size(); ++b) {
      d.dz.push_back(sym(rd[b] - a_dy[b]));
      d.dx.push_back(sym(rc[b] - w[b] * d.dz.back() * w[b]));
    }
    return d;
  }

  const RealProblem& p_;
  const SdpOptions& opt_;
  double total_dim_ = 0.0;
  std::vector<std::vector<MatrixXd>> wa_w_;
  std::vector<MatrixXd> w_;
  Eigen::LDLT<MatrixXd> schur_;
};

CMatrix lift(const MatrixXd& x, bool embedded) {
  if (!embedded) return x.cast<Complex>();
  const auto d = x.rows() / 2;
  const MatrixXd re = 0.5 * (x.topLeftCorner(d, d) + x.bottomRightCorner(d, d));
  const MatrixXd im = 0.5 * (x.bottomLeftCorner(d, d) - x.topRightCorner(d, d));
  CMatrix out(d, d);
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  problem.check_constraint_rank();
  const RealProblem rp = lower(problem);

  InteriorPoint ipm(rp, options);
  int iterations = 0;
  const Iterate it = ipm.run(iterations);

  SdpSolution s;
  s.iterations = iterations;
  for (const auto& x : it.x) s.primal.emplace_back(lift(x, rp.complex_embedding), 1e-8);
  s.dual.assign(static_cast<size_t>(problem.num_constraints()), 0.0);
  for (size_t k = 0; k < rp.source.size(); ++k) {
    // Internal multipliers belong to the minimization form.
    s.dual[rp.source[k]] = -it.y(static_cast<Eigen::Index>(k));
  }
  s.slack = problem.dual_slack(s.dual);
  s.primal_objective = problem.objective_value(s.primal);
  s.dual_objective = 0.0;
  for (int j = 0; j < problem.num_constraints(); ++j) {
    s.dual_objective += problem.constraints()[j].rhs * s.dual[j];
  }
  s.gap = s.dual_objective - s.primal_objective;
  return s;
}

double KktReport::worst_residual() const {
  return std::max({primal_residual, std::max(0.0, -primal_min_eigenvalue),
                   std::max(0.0, -dual_min_eigenvalue), std::abs(complementarity)});
}

KktReport verify_kkt(const SdpProblem& problem, const std::vector<HermitianOperator>& primal,
                     const std::vector<double>& dual, double tol) {
  if (static_cast<int>(primal.size()) != problem.num_blocks() ||
      static_cast<int>(dual.size()) != problem.num_constraints()) {
    throw DimensionMismatch("verify_kkt: solution shape does not match problem");
  }
  for (int b = 0; b < problem.num_blocks(); ++b) {
    if (primal[b].dim() != problem.block(b).dim) {
      throw DimensionMismatch("verify_kkt: block dimension mismatch");
    }
  }
  KktReport r;
  for (double v : problem.constraint_residuals(primal)) {
    r.primal_residual = std::max(r.primal_residual, std::abs(v));
  }
  r.primal_min_eigenvalue = std::numeric_limits<double>::infinity();
  r.dual_min_eigenvalue = std::numeric_limits<double>::infinity();
  const auto z = problem.dual_slack(dual);
  for (int b = 0; b < problem.num_blocks(); ++b) {
    r.primal_min_eigenvalue = std::min(r.primal_min_eigenvalue, primal[b].min_eigenvalue());
    r.dual_min_eigenvalue = std::min(r.dual_min_eigenvalue, z[b].min_eigenvalue());
    r.complementarity += primal[b].hs_inner(z[b]);
  }
  double dual_obj = 0.0;
  for (int j = 0; j < problem.num_constraints(); ++j) {
    dual_obj += problem.constraints()[j].rhs * dual[j];
  }
  r.duality_gap = dual_obj - problem.objective_value(primal);
  r.primal_feasible = r.primal_residual <= tol && r.primal_min_eigenvalue >= -tol;
  r.dual_feasible = r.dual_min_eigenvalue >= -tol;
  r.complementary = std::abs(r.complementarity) <= tol;
  return r;
}

KktReport verify_kkt(const SdpProblem& problem, const SdpSolution& solution, double tol) {
  return verify_kkt(problem, solution.primal, solution.dual, tol);
}

}  // namespace dpsqkd
