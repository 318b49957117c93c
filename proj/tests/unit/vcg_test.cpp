#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fvcg/acceptance_solver.hpp"
#include "fvcg/errors.hpp"
#include "fvcg/rng.hpp"
#include "fvcg/vcg.hpp"

namespace fvcg {
namespace {

std::vector<double> tenths() {
  std::vector<double> g;
  for (int k = 1; k <= 10; ++k) g.push_back(k / 10.0);
  return g;
}

Instance equal_quality() { return Instance(std::vector<double>(10, 1.0), tenths()); }

Instance random_instance(const EconomicSpec& spec, std::size_t n, Rng& rng) {
  std::vector<double> q(n);
  std::vector<double> g(n);
  for (double& v : q) v = rng.uniform(spec.prior_q.lo, spec.prior_q.hi);
  for (double& v : g) v = rng.uniform(spec.prior_gamma.lo, spec.prior_gamma.hi);
  return Instance(q, g);
}

// S^{-0*} of the equal-quality scenario, derived by hand: owners 0.2..0.6
// fully accepted, the 0.7 owner fills up to Q* = 10 / (4 * 0.7^2).
double reduced_surplus_owner0() {
  const double q_star = 10.0 / (4 * 0.49);
  return std::sqrt(10.0 * q_star) - 2.0 - 0.7 * (q_star - 5.0);
}

TEST(VcgPayments, EqualQualityScenario) {
  const auto spec = EconomicSpec::reference_economy(10);
  const auto vcg = vcg_payment_vector(spec, equal_quality());
  const double s_star = std::sqrt(60.0) - 2.1;
  EXPECT_NEAR(vcg.surplus_star, s_star, 1e-12);
  EXPECT_NEAR(vcg.surplus_minus[0], reduced_surplus_owner0(), 1e-12);
  EXPECT_NEAR(vcg.tau[0], s_star - reduced_surplus_owner0() + 0.1, 1e-12);
  EXPECT_NEAR(vcg.tau[0], 0.6745, 5e-5);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(vcg.tau[i], 0.67, 0.005) << i;
  for (int i = 6; i < 10; ++i) EXPECT_NEAR(vcg.tau[i], 0.0, 1e-12) << i;
}

TEST(VcgPayments, LoneOwnerIsPaidTheRevenue) {
  const auto spec = EconomicSpec::sqrt_sum(1.0, {0, 5}, {0, 1});
  const auto vcg = vcg_payment_vector(spec, Instance({1.0}, {1.0}));
  EXPECT_EQ(vcg.surplus_minus[0], 0.0);
  EXPECT_NEAR(vcg.tau[0], 0.5, 1e-15);  // sqrt(0.25)
}

TEST(VcgPayments, InvariantsOnRandomInstances) {
  const auto spec = EconomicSpec::reference_economy(10);
  Rng rng(31);
  for (int s = 0; s < 200; ++s) {
    const auto inst = random_instance(spec, 10, rng);
    const auto vcg = vcg_payment_vector(spec, inst);
    const auto star = solve_closed_form(spec, inst);
    EXPECT_EQ(vcg.surplus_star, star.surplus_star);
    // Truthful reports realize the maximum surplus.
    EXPECT_NEAR(social_surplus(spec, inst, vcg.eta_star.eta), vcg.surplus_star, 1e-12);
    for (std::size_t i = 0; i < 10; ++i) {
      const double c = cost(spec, inst.q[i] * vcg.eta_star[i], inst.gamma[i]);
      EXPECT_NEAR(vcg.tau[i], vcg.surplus_star - vcg.surplus_minus[i] + c, 1e-9);
      EXPECT_LE(vcg.surplus_minus[i], vcg.surplus_star + 1e-9);
      EXPECT_GE(vcg.tau[i], 0.0);
      EXPECT_EQ(vcg.surplus_minus[i], solve_reduced(spec, inst, i).surplus_star);
    }
  }
}

TEST(VcgPayments, FreeDataReducedSurplusIsDirectFormula) {
  const auto spec = EconomicSpec::reference_economy(4);
  const Instance inst({0.5, 1.5, 2.0, 4.0}, {0, 0, 0, 0});
  const auto vcg = vcg_payment_vector(spec, inst);
  const double total = 8.0;
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(vcg.surplus_minus[i], 2.0 * std::sqrt(total - inst.q[i]), 1e-12);
  }
}

TEST(AssemblePayments, AddsWithoutClamping) {
  VcgComputation vcg;
  vcg.tau = {0.67, 0.0};
  const auto p = assemble_payments(vcg, std::vector<double>{0.3362, -0.5});
  EXPECT_NEAR(p.total[0], 1.01, 0.005);
  EXPECT_DOUBLE_EQ(p.total[1], -0.5);
  const auto zero = assemble_payments(vcg, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(zero.total, vcg.tau);
  EXPECT_THROW(assemble_payments(vcg, std::vector<double>{1.0}), DimensionError);
}

TEST(Slack, BudgetBalanceAndRationality) {
  const auto spec = EconomicSpec::reference_economy(10);
  const auto inst = equal_quality();
  const auto vcg = vcg_payment_vector(spec, inst);
  const auto zero_pay = assemble_payments(VcgComputation{0, {}, std::vector<double>(10, 0.0), {}},
                                          std::vector<double>(10, 0.0));
  const double b = revenue(spec, accepted_quality(inst, vcg.eta_star.eta));
  EXPECT_DOUBLE_EQ(wbb_slack(spec, inst, zero_pay, vcg.eta_star.eta), b);

  // Table-row adjustments around 0.336 keep the budget balanced here.
  const auto p = assemble_payments(vcg, std::vector<double>(10, 0.336));
  EXPECT_GE(wbb_slack(spec, inst, p, vcg.eta_star.eta), 0.0);
  EXPECT_NEAR(ir_slack(spec, inst, p, vcg.eta_star.eta, 0), 0.6745 + 0.336 - 0.1, 1e-4);
  EXPECT_NEAR(ir_slack(spec, inst, p, vcg.eta_star.eta, 8), 0.336, 1e-12);

  const auto exact = assemble_payments(VcgComputation{0, {}, {0.1}, {}}, std::vector<double>{0.0});
  EXPECT_EQ(ir_slack(spec, Instance({1.0}, {0.1}), exact, std::vector<double>{1.0}, 0), 0.0);
}

TEST(Slack, EqualCostTypeScenarioBreaksBudgetWithTypicalAdjustment) {
  const auto spec = EconomicSpec::reference_economy(10);
  std::vector<double> q;
  for (int k = 1; k <= 10; ++k) q.push_back(k / 2.0);
  const Instance inst(q, std::vector<double>(10, 0.8));
  const auto vcg = vcg_payment_vector(spec, inst);
  const auto p = assemble_payments(vcg, std::vector<double>(10, 0.35));
  EXPECT_LT(wbb_slack(spec, inst, p, vcg.eta_star.eta), 0.0);
}

TEST(Slack, BudgetBalanceEquivalentForm) {
  const auto spec = EconomicSpec::reference_economy(10);
  Rng rng(41);
  for (int s = 0; s < 100; ++s) {
    const auto inst = random_instance(spec, 10, rng);
    const auto vcg = vcg_payment_vector(spec, inst);
    std::vector<double> adj(10);
    for (double& a : adj) a = rng.uniform(-0.5, 1.0);
    const auto p = assemble_payments(vcg, adj);
    double mc = 0.0;
    for (std::size_t i = 0; i < 10; ++i) mc += vcg.marginal_contribution(i);
    const double sum_adj = std::accumulate(adj.begin(), adj.end(), 0.0);
    // slack = S* - sum(mc) - sum(adj)
    EXPECT_NEAR(wbb_slack(spec, inst, p, vcg.eta_star.eta), vcg.surplus_star - mc - sum_adj,
                1e-9);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_NEAR(ir_slack(spec, inst, p, vcg.eta_star.eta, i),
                  vcg.marginal_contribution(i) + adj[i], 1e-9);
    }
  }
}

TEST(Feasibility, EqualQualityScenarioWithZeroFloor) {
  const auto spec = EconomicSpec::reference_economy(10);
  const auto f = feasibility_condition(spec, equal_quality());
  // With q_lo = 0 the clamped owner contributes nothing, so each term is the
  // owner's marginal contribution: six times (tau_0 - gamma_i) summed.
  const double s_star = std::sqrt(60.0) - 2.1;
  const double expected = 6 * (s_star - reduced_surplus_owner0() + 0.1) - 2.1;
  EXPECT_NEAR(f.lhs, expected, 1e-9);
  EXPECT_NEAR(f.lhs, 1.947, 5e-4);
  EXPECT_NEAR(f.rhs, s_star, 1e-12);
  EXPECT_TRUE(f.holds);
}

TEST(Feasibility, LoneOwnerAlwaysHolds) {
  const auto spec = EconomicSpec::sqrt_sum(1.0, {0.5, 5}, {0, 1});
  const auto f = feasibility_condition(spec, Instance({2.0}, {0.3}));
  EXPECT_TRUE(f.holds);
  EXPECT_LE(f.lhs, f.rhs);
}

TEST(Feasibility, FreeDataHolds) {
  const auto spec = EconomicSpec::reference_economy(6);
  Rng rng(3);
  for (int s = 0; s < 100; ++s) {
    std::vector<double> q(6);
    for (double& v : q) v = rng.uniform(0, 5);
    EXPECT_TRUE(feasibility_condition(spec, Instance(q, std::vector<double>(6, 0.0))).holds);
  }
}

}  // namespace
}  // namespace fvcg
