#include "fvcg/vcg.hpp"

#include <string>

#include "fvcg/errors.hpp"

namespace fvcg {

VcgComputation vcg_payment_vector(const EconomicSpec& spec, const Instance& inst) {
  const std::size_t n = inst.size();
  VcgComputation out;
  SolveResult full = solve_optimal(spec, inst);
  out.surplus_star = full.surplus_star;
  out.surplus_minus.resize(n);
  out.tau.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.surplus_minus[i] = solve_reduced(spec, inst, i).surplus_star;
    out.tau[i] = out.surplus_star - out.surplus_minus[i] +
                 cost(spec, inst.q[i] * full.eta_star[i], inst.gamma[i]);
  }
  out.eta_star = std::move(full.eta_star);
  return out;
}

PaymentBreakdown assemble_payments(const VcgComputation& vcg, std::span<const double> adjustments) {
  if (adjustments.size() != vcg.size()) {
    throw DimensionError("adjustment vector length " + std::to_string(adjustments.size()) +
                         " does not match n=" + std::to_string(vcg.size()));
  }
  PaymentBreakdown out;
  out.tau = vcg.tau;
  out.adjustment.assign(adjustments.begin(), adjustments.end());
  out.total.resize(vcg.size());
  for (std::size_t i = 0; i < vcg.size(); ++i) out.total[i] = out.tau[i] + out.adjustment[i];
  return out;
}

double wbb_slack(const EconomicSpec& spec, const Instance& inst, const PaymentBreakdown& payments,
                 std::span<const double> eta) {
  if (payments.size() != inst.size()) throw DimensionError("payments do not match instance");
  double paid = 0.0;
  for (double p : payments.total) paid += p;
  return revenue(spec, accepted_quality(inst, eta)) - paid;
}

double ir_slack(const EconomicSpec& spec, const Instance& inst, const PaymentBreakdown& payments,
                std::span<const double> eta, std::size_t owner) {
  if (owner >= inst.size() || owner >= payments.size() || owner >= eta.size()) {
    throw DimensionError("owner index " + std::to_string(owner) + " out of range");
  }
  return utility(spec, payments.total[owner], inst.q[owner] * eta[owner], inst.gamma[owner]);
}

FeasibilityCheck feasibility_condition(const EconomicSpec& spec, const Instance& inst) {
  FeasibilityCheck out;
  const double s_star = solve_optimal(spec, inst).surplus_star;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    Instance worst = inst;
    worst.q[i] = spec.prior_q.lo;
    worst.gamma[i] = spec.prior_gamma.hi;
    out.lhs += s_star - solve_optimal(spec, worst).surplus_star;
  }
  out.rhs = s_star;
  out.holds = out.lhs <= out.rhs;
  return out;
}

}  // namespace fvcg
