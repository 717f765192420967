#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpsqkd/quantum.hpp"

namespace dpsqkd {

/// Dense semidefinite program over Hermitian PSD blocks:
///
///   maximize    sum_b <C_b, X_b>
///   subject to  sum_b <A_{j,b}, X_b> = r_j   for every constraint j
///               X_b >= 0
///
/// with dual
///
///   minimize    sum_j r_j y_j
///   subject to  Z_b = sum_j y_j A_{j,b} - C_b >= 0.
class SdpProblem {
 public:
  struct Block {
    std::string name;
    int dim = 0;
  };

  struct Term {
    int block = 0;
    HermitianOperator coeff;
  };

  struct Constraint {
    std::vector<Term> terms;
    double rhs = 0.0;
    std::string label;
  };

  int add_block(std::string name, int dim);
  void set_objective(int block, HermitianOperator cost);
  void add_constraint(std::vector<Term> terms, double rhs, std::string label = {});

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const Block& block(int b) const { return blocks_.at(b); }
  const std::vector<Block>& blocks() const { return blocks_; }
  const HermitianOperator& objective(int b) const { return objective_.at(b); }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  /// Sum over blocks of <C_b, X_b>.
  double objective_value(const std::vector<HermitianOperator>& x) const;
  /// sum_b <A_{j,b}, X_b> - r_j for every j.
  std::vector<double> constraint_residuals(const std::vector<HermitianOperator>& x) const;
  /// Z_b = sum_j y_j A_{j,b} - C_b.
  std::vector<HermitianOperator> dual_slack(const std::vector<double>& y) const;

  /// Throws InfeasibleConstraints when constraint rows are linearly dependent.
  void check_constraint_rank() const;

 private:
  void check_block(int b, const HermitianOperator& op) const;

  std::vector<Block> blocks_;
  std::vector<HermitianOperator> objective_;
  std::vector<Constraint> constraints_;
};

// Named constraint builders. Both emit one real constraint per independent
// real parameter of a Hermitian matrix equation (real parts on and above the
// diagonal, imaginary parts above it).

/// sum_{b in blocks} X_b = I_dim.
void add_sum_to_identity(SdpProblem& problem, const std::vector<int>& blocks, int dim);

/// Tr_{all but kept}(X_block) = I on subsystem `kept`, where X_block lives on
/// the tensor product described by `dims`.
void add_partial_trace_identity(SdpProblem& problem, int block, const std::vector<int>& dims,
                                int kept);

enum class SolverStatus { MaxIterations, NumericalBreakdown, InfeasibleConstraints };

class SolverError : public std::runtime_error {
 public:
  SolverError(SolverStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  SolverStatus status() const { return status_; }

 private:
  SolverStatus status_;
};

const char* to_string(SolverStatus s);

struct SdpOptions {
  int max_iterations = 100;
  double gap_tolerance = 1e-9;          // relative to 1 + |primal objective|
  double feasibility_tolerance = 1e-10;  // relative constraint / dual residuals
  double step_fraction = 0.98;           // fraction-to-boundary
  double centering = 0.1;                // fixed sigma when predictor-corrector is off
  bool predictor_corrector = false;
  std::ostream* trace = nullptr;  // JSON-lines iterate dump when set
};

struct SdpSolution {
  std::vector<HermitianOperator> primal;  // X_b
  std::vector<double> dual;               // y_j
  std::vector<HermitianOperator> slack;   // Z_b
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

struct KktReport {
  double primal_residual = 0.0;       // max |A(X) - r|
  double primal_min_eigenvalue = 0.0;  // min over blocks
  double dual_min_eigenvalue = 0.0;    // min over blocks of Z = A*(y) - C
  double complementarity = 0.0;        // sum_b <X_b, Z_b>
  double duality_gap = 0.0;            // r.y - <C, X>
  bool primal_feasible = false;
  bool dual_feasible = false;
  bool complementary = false;

  bool passed() const { return primal_feasible && dual_feasible && complementary; }
  /// Largest violation among the three conditions.
  double worst_residual() const;
};

/// Independent optimality check: recomputes Z from y and tests primal
/// feasibility, dual feasibility and complementary slackness at `tol`.
KktReport verify_kkt(const SdpProblem& problem, const std::vector<HermitianOperator>& primal,
                     const std::vector<double>& dual, double tol);
KktReport verify_kkt(const SdpProblem& problem, const SdpSolution& solution, double tol);

}  // namespace dpsqkd
