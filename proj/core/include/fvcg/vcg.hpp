#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fvcg/acceptance_solver.hpp"
#include "fvcg/econ.hpp"

namespace fvcg {

// tau_i = S* - S^{-i*} + c_i(q_i eta*_i, gamma_i).
struct VcgComputation {
  double surplus_star = 0.0;
  std::vector<double> surplus_minus;
  std::vector<double> tau;
  AcceptanceVector eta_star;

  std::size_t size() const { return tau.size(); }
  // S* - S^{-i*}: owner i's marginal contribution to the surplus.
  double marginal_contribution(std::size_t i) const { return surplus_star - surplus_minus[i]; }
};

struct PaymentBreakdown {
  std::vector<double> tau;
  std::vector<double> adjustment;
  std::vector<double> total;

  std::size_t size() const { return total.size(); }
};

VcgComputation vcg_payment_vector(const EconomicSpec& spec, const Instance& inst);

// total = tau + adjustments. No clamping.
PaymentBreakdown assemble_payments(const VcgComputation& vcg, std::span<const double> adjustments);

// B(q . eta) - sum p_i; weak budget balance holds iff >= 0.
double wbb_slack(const EconomicSpec& spec, const Instance& inst, const PaymentBreakdown& payments,
                 std::span<const double> eta);

// u_i = p_i - c_i(q_i eta_i, gamma_i); individual rationality holds iff >= 0.
double ir_slack(const EconomicSpec& spec, const Instance& inst, const PaymentBreakdown& payments,
                std::span<const double> eta, std::size_t owner);

struct FeasibilityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Existence condition for adjustments that give both IR and WBB:
//   sum_i [S*(q, gamma) - S*((q_lo, q^{-i}), (gamma_hi, gamma^{-i}))] <= S*(q, gamma)
// with q_lo / gamma_hi the endpoints of the spec's prior ranges.
FeasibilityCheck feasibility_condition(const EconomicSpec& spec, const Instance& inst);

}  // namespace fvcg
