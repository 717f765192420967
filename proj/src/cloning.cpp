#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpsqkd/attacks.hpp"

namespace dpsqkd {

HermitianOperator apply_choi(const HermitianOperator& choi, const HermitianOperator& rho, int d) {
  if (rho.dim() != d || choi.dim() != d * d * d) {
    throw DimensionMismatch("apply_choi: expected a d^3 Choi matrix and a d-dimensional input");
  }
  auto idx = [d](int y, int x, int z) { return (y * d + x) * d + z; };
  const CMatrix& j = choi.matrix();
  CMatrix out = CMatrix::Zero(d * d, d * d);
  for (int y = 0; y < d; ++y)
    for (int z = 0; z < d; ++z)
      for (int y2 = 0; y2 < d; ++y2)
        for (int z2 = 0; z2 < d; ++z2) {
          Complex acc = 0.0;
          for (int x = 0; x < d; ++x)
            for (int x2 = 0; x2 < d; ++x2) acc += rho(x2, x) * j(idx(y, x2, z), idx(y2, x, z2));
          out(y * d + z, y2 * d + z2) = acc;
        }
  return HermitianOperator(out, 1e-9);
}

CloningResult optimal_cloner(std::span<const Ket> states, std::span<const double> priors,
                             const SdpOptions& options) {
  if (states.empty() || states.size() != priors.size()) {
    throw DimensionMismatch("optimal_cloner: one prior per state required");
  }
  const int d = states.front().dim();
  HermitianOperator cost = HermitianOperator::zero(d * d * d);
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != d) throw DimensionMismatch("optimal_cloner: states differ in dimension");
    const auto p = HermitianOperator::projector(states[i]);
    const auto pbar = HermitianOperator::projector(states[i].conjugate());
    cost += priors[i] * tensor(tensor(p, pbar), p);
  }

  SdpProblem problem;
  const int block = problem.add_block("J", d * d * d);
  problem.set_objective(block, cost);
  add_partial_trace_identity(problem, block, {d, d, d}, 1);
  const SdpSolution sol = solve(problem, options);

  CloningResult r;
  r.dim = d;
  r.choi = sol.primal.front();
  r.avg_two_copy_fidelity = sol.primal_objective;
  r.kkt = verify_kkt(problem, sol, 1e-6);
  r.iterations = sol.iterations;
  const auto tp = partial_trace(r.choi, {d, d, d}, {1});
  r.tp_residual = (tp.matrix() - CMatrix::Identity(d, d)).norm();
  for (const auto& psi : states) {
    const auto joint = apply_choi(r.choi, HermitianOperator::projector(psi), d);
    r.bob_states.push_back(partial_trace(joint, {d, d}, {0}));
    r.eve_states.push_back(partial_trace(joint, {d, d}, {1}));
    r.per_state_clone_fidelity.push_back(fidelity_pure(psi, r.bob_states.back()));
  }
  return r;
}

CloningResult optimal_cloner(const DpsEnsemble& ensemble, const SdpOptions& options) {
  return optimal_cloner(ensemble.states, ensemble.priors, options);
}

DepolarizingFit depolarizing_fit(const HermitianOperator& original,
                                 const HermitianOperator& cloned) {
  if (original.dim() != cloned.dim()) throw DimensionMismatch("depolarizing_fit: dimension mismatch");
  const int d = original.dim();
  const HermitianOperator mixed = (1.0 / d) * HermitianOperator::identity(d);
  const HermitianOperator a = mixed - original;
  const HermitianOperator b = cloned - original;
  const double aa = a.hs_inner(a);
  DepolarizingFit fit;
  fit.p = aa > kAlgebraicTol ? b.hs_inner(a) / aa : 0.0;
  fit.residual = cloned.frobenius_distance((1.0 - fit.p) * original + fit.p * mixed);
  return fit;
}

double UnitaryClonerParams::max_q(int d) {
  if (d < 2) throw std::invalid_argument("unitary cloner: dimension must be >= 2");
  return 1.0 / std::sqrt(2.0 * (d - 1));
}

UnitaryClonerParams UnitaryClonerParams::make(double q, std::vector<Ket> basis) {
  const int d = static_cast<int>(basis.size());
  const double qmax = max_q(d);
  if (!(q >= 0.0 && q <= qmax * (1.0 + 1e-15))) {
    throw std::invalid_argument("unitary cloner: q outside [0, 1/sqrt(2(d-1))]");
  }
  for (int i = 0; i < d; ++i) {
    if (basis[i].dim() != d) throw DimensionMismatch("unitary cloner: basis vector dimension");
    for (int j = 0; j < d; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      if (std::abs(basis[i].inner(basis[j]) - target) > 1e-10) {
        throw std::invalid_argument("unitary cloner: basis is not orthonormal");
      }
    }
  }
  UnitaryClonerParams u;
  u.d = d;
  u.q = std::min(q, qmax);
  u.p = std::sqrt(std::max(0.0, 1.0 - 2.0 * (d - 1) * u.q * u.q));
  u.basis = std::move(basis);
  return u;
}

double UnitaryClonerParams::unitarity_residual() const {
  return std::abs(p * p + 2.0 * (d - 1) * q * q - 1.0);
}

UnitaryCloneOutput apply_unitary_cloner(const UnitaryClonerParams& params, const Ket& input) {
  const int d = params.d;
  if (input.dim() != d) throw DimensionMismatch("apply_unitary_cloner: input dimension");
  if (std::abs(input.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("apply_unitary_cloner: input is not normalized");
  }
  auto triple = [d](const CVector& a, const CVector& b, int anc) {
    CVector out = CVector::Zero(d * d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out((i * d + j) * d + anc) = a(i) * b(j);
    return out;
  };
  CVector joint = CVector::Zero(d * d * d);
  for (int i = 0; i < d; ++i) {
    const Complex c = params.basis[i].inner(input);
    if (std::abs(c) == 0.0) continue;
    const CVector& ei = params.basis[i].amplitudes();
    joint += c * params.p * triple(ei, ei, i);
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const CVector& ej = params.basis[j].amplitudes();
      joint += c * params.q * (triple(ei, ej, j) + triple(ej, ei, j));
    }
  }
  UnitaryCloneOutput out;
  out.joint = Ket(joint);
  const auto rho = HermitianOperator::projector(out.joint);
  out.bob = partial_trace(rho, {d, d, d}, {0});
  out.eve = partial_trace(rho, {d, d, d}, {1});
  return out;
}

std::vector<Ket> dps3_cloner_basis() {
  const double a = 1.0 / std::sqrt(3.0);
  const double b = 1.0 / std::sqrt(6.0);
  const double c = 1.0 / std::sqrt(2.0);
  return {Ket{a, a, a}, Ket{b, b, -2.0 * b}, Ket{c, -c, 0.0}};
}

double unitary_average_fidelity(std::span<const Ket> states, std::span<const double> priors,
                                const std::vector<Ket>& basis, double q) {
  const auto params = UnitaryClonerParams::make(q, basis);
  double f = 0.0;
  for (size_t i = 0; i < states.size(); ++i) {
    f += priors[i] * fidelity_pure(states[i], apply_unitary_cloner(params, states[i]).bob);
  }
  return f;
}

UnitaryOptimum optimize_unitary_q(std::span<const Ket> states, std::span<const double> priors,
                                  const std::vector<Ket>& basis, double tol) {
  if (states.empty() || states.size() != priors.size()) {
    throw DimensionMismatch("optimize_unitary_q: one prior per state required");
  }
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = UnitaryClonerParams::max_q(static_cast<int>(basis.size()));
  UnitaryOptimum r;
  auto f = [&](double q) {
    ++r.evaluations;
    return unitary_average_fidelity(states, priors, basis, q);
  };
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  // The bracket endpoints are candidates too: the maximum may sit on the boundary.
  double best_q = 0.5 * (lo + hi);
  double best_f = f(best_q);
  for (double q : {0.0, UnitaryClonerParams::max_q(static_cast<int>(basis.size()))}) {
    const double v = f(q);
    if (v > best_f) {
      best_f = v;
      best_q = q;
    }
  }
  r.q_opt = best_q;
  r.avg_fidelity = best_f;
  return r;
}

MedResult med_on_cloned(std::span<const HermitianOperator> eve_states,
                        std::span<const double> priors,
                        const std::vector<std::vector<int>>* bit_map, const SdpOptions& options) {
  for (const auto& s : eve_states) {
    if (!s.is_density(1e-8, 1e-8)) {
      throw std::invalid_argument("med_on_cloned: Eve state is not a density matrix");
    }
  }
  return med_attack(eve_states, priors, bit_map, options);
}

}  // namespace dpsqkd
