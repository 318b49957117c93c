#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "fvcg/analysis.hpp"
#include "fvcg/errors.hpp"

namespace fvcg {
namespace {

AdjustmentModel small_model(std::size_t n, std::uint64_t seed) {
  const auto spec = EconomicSpec::reference_economy(n);
  TrainingConfig config;
  config.h_hidden = {4};
  config.g_hidden = 5;
  Rng rng(seed);
  auto m = initial_model(spec, n, config, rng);
  for (double& w : m.h_net.layers().back().weights) w = rng.uniform(-0.5, 0.5);
  return m;
}

TEST(Scenarios, ReferenceSets) {
  const auto eq = equal_quality_scenarios();
  ASSERT_EQ(eq.size(), 4u);
  EXPECT_EQ(eq[2].q, std::vector<double>(10, 3.0));
  EXPECT_EQ(eq[0].gamma.front(), 0.1);
  EXPECT_EQ(eq[0].gamma.back(), 1.0);
  const auto ec = equal_cost_type_scenarios();
  ASSERT_EQ(ec.size(), 4u);
  EXPECT_EQ(ec[1].gamma, std::vector<double>(10, 0.4));
  EXPECT_EQ(ec[0].q.front(), 0.5);
  EXPECT_EQ(ec[0].q.back(), 5.0);
}

TEST(SolveScenario, PaymentsEqualMechanismPart) {
  const auto spec = EconomicSpec::reference_economy(10);
  const auto r = solve_scenario(spec, TrainingConfig{}, equal_quality_scenarios()[0]);
  ASSERT_EQ(r.rows.size(), 10u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.adjustment, 0.0);
    EXPECT_EQ(row.payment, row.tau);
  }
  EXPECT_EQ(r.losses.loss2, 0.0);
  EXPECT_NEAR(r.losses.total,
              weighted_loss(TrainingConfig{}, r.losses.loss1, r.losses.loss2, r.losses.loss3),
              1e-9);
}

TEST(SolveScenario, LoneOwnerIsPaidTheRevenue) {
  const auto spec = EconomicSpec::sqrt_sum(1.0, {0, 5}, {0, 1});
  const auto r = solve_scenario(spec, TrainingConfig{}, Scenario{"one", {1.0}, {1.0}});
  EXPECT_NEAR(r.rows[0].eta, 0.25, 1e-15);
  EXPECT_NEAR(r.rows[0].tau, 0.5, 1e-15);
}

TEST(EvaluateScenario, RowIdentitiesHold) {
  const auto spec = EconomicSpec::reference_economy(10);
  const auto m = small_model(10, 3);
  const TrainingConfig w;
  for (const auto& s : equal_cost_type_scenarios()) {
    const auto r = evaluate_scenario(spec, w, m, s);
    for (const auto& row : r.rows) EXPECT_NEAR(row.payment, row.tau + row.adjustment, 1e-9);
    EXPECT_NEAR(r.losses.total, weighted_loss(w, r.losses.loss1, r.losses.loss2, r.losses.loss3),
                1e-9);
  }
}

TEST(EvaluateScenario, ZeroModelPaysMechanismOnly) {
  const auto spec = EconomicSpec::reference_economy(10);
  AdjustmentModel m;
  m.n = 10;
  m.h_net = DenseNet({18, 3, 1});
  m.g_net = MonotonicNet(3);
  const auto r = evaluate_scenario(spec, TrainingConfig{}, m, equal_quality_scenarios()[1]);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.adjustment, 0.0);
    EXPECT_EQ(row.payment, row.tau);
  }
}

TEST(EvaluateScenario, TypicalAdjustmentBreaksBudgetAtHighCostType) {
  const auto spec = EconomicSpec::reference_economy(10);
  AdjustmentModel m;
  m.n = 10;
  m.h_net = DenseNet({18, 3, 1});
  m.h_net.output_bias() = 0.35;
  m.g_net = MonotonicNet(3);
  const auto r = evaluate_scenario(spec, TrainingConfig{}, m, equal_cost_type_scenarios()[3]);
  EXPECT_GT(r.losses.loss3, 0.0);
  EXPECT_EQ(r.losses.loss2, 0.0);
}

TEST(EvaluateScenario, SizeMismatchIsAConfigError) {
  const auto spec = EconomicSpec::reference_economy(10);
  const auto m = small_model(4, 1);
  EXPECT_THROW(evaluate_scenario(spec, TrainingConfig{}, m, equal_quality_scenarios()[0]),
               ConfigError);
}

TEST(Tables, ScenarioTableRoundTripsAndMatchesResults) {
  const auto spec = EconomicSpec::reference_economy(10);
  std::vector<ScenarioResult> results;
  for (const auto& s : equal_quality_scenarios()) {
    results.push_back(solve_scenario(spec, TrainingConfig{}, s));
  }
  const auto table = scenario_table(results);
  EXPECT_EQ(table.rows.size(), 40u);
  EXPECT_EQ(table.header.size(), 12u);
  const auto text = write_csv(table);
  EXPECT_EQ(write_csv(parse_csv(text)), text);
  const auto back = parse_csv(text);
  EXPECT_EQ(parse_number(back.rows[0][back.column("tau")]), results[0].rows[0].tau);
  EXPECT_EQ(back.rows[13][back.column("scenario")], "equal_q_2");
}

TEST(Tables, LossCurve) {
  std::vector<LossReport> curve{{0.1, 0.2, 0.3, 0.4}, {1.0 / 3, 0, 0, 0.4 / 3}};
  const auto t = loss_curve_table(curve);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][0], "1");
  EXPECT_EQ(parse_number(t.rows[1][1]), 1.0 / 3);
}

TEST(Surface, ShapeAlongBothAxes) {
  const auto spec = EconomicSpec::reference_economy(10);
  const auto m = small_model(10, 7);
  SurfaceOptions o;
  o.q_points = 21;
  o.gamma_points = 21;
  const auto t = payment_surface(spec, m, o);
  ASSERT_EQ(t.rows.size(), 21u * 21u);
  const auto col = [&](const char* name) { return t.column(name); };
  std::vector<std::vector<double>> p(21, std::vector<double>(21));
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    const std::size_t gi = k / 21;
    const std::size_t qi = k % 21;
    p[gi][qi] = parse_number(row[col("p0")]);
    EXPECT_NEAR(p[gi][qi],
                parse_number(row[col("tau0")]) + parse_number(row[col("adjustment0")]), 1e-12);
    if (qi == 0) {
      EXPECT_EQ(parse_number(row[col("tau0")]), 0.0);
    }
  }
  for (std::size_t gi = 0; gi < 21; ++gi) {
    for (std::size_t qi = 1; qi < 21; ++qi) EXPECT_GE(p[gi][qi], p[gi][qi - 1] - 1e-6);
  }
  // Along gamma the payment is constant, drops, then is constant again.
  const std::size_t qi = 20;
  for (std::size_t gi = 1; gi < 21; ++gi) EXPECT_LE(p[gi][qi], p[gi - 1][qi] + 1e-9);
  EXPECT_GT(p[0][qi] - p[20][qi], 0.1);
}

TEST(Suites, MechanismPropertiesHold) {
  const auto spec = EconomicSpec::reference_economy(10);
  Rng rng(1);
  EXPECT_TRUE(check_surplus_monotonicity(spec, 10, 100, 1e-9, rng).passed());
  EXPECT_TRUE(check_surplus_dominance(spec, 10, 100, 1e-9, rng).passed());
  EXPECT_TRUE(check_cost_truthfulness(spec, 10, 50, 10, 1e-8, rng).passed());
  EXPECT_TRUE(check_quality_truthfulness(spec, 10, 50, 10, 1e-8, rng).passed());
  const auto m = small_model(10, 2);
  EXPECT_TRUE(check_cost_truthfulness(spec, 10, 30, 5, 1e-8, rng, &m).passed());
  EXPECT_TRUE(check_quality_truthfulness(spec, 10, 30, 5, 1e-8, rng, &m).passed());
  EXPECT_TRUE(check_monotone_net(200, 5, 10, rng, &m).passed());
}

TEST(Suites, ViolationsAreCountedAndSampled) {
  const auto spec = EconomicSpec::reference_economy(4);
  auto m = small_model(4, 5);
  m.g_net = MonotonicNet(1);
  m.g_net.hidden_weights = {50.0};
  m.g_net.output_weights = {100.0};
  m.g_net.hidden_biases = {-25.0};
  // A steep step-like g is still increasing, so under-reporting never pays.
  Rng rng(3);
  EXPECT_TRUE(check_quality_truthfulness(spec, 4, 50, 5, 1e-8, rng, &m).passed());
  // With a negative tolerance every comparison counts as a violation.
  const auto r = check_surplus_dominance(spec, 4, 5, -1e6, rng);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.violations, r.checked);
  EXPECT_LE(r.examples.size(), 5u);
}

TEST(Suites, FeasibilityIsReportedNotAsserted) {
  const auto spec = EconomicSpec::reference_economy(10);
  Rng rng(4);
  const auto r = check_feasibility(spec, 10, 200, rng);
  EXPECT_FALSE(r.asserted);
  EXPECT_TRUE(r.passed());
  EXPECT_GE(r.worst, 0.0);
  EXPECT_LE(r.worst, 1.0);
}

TEST(Suites, ShrinkingPriorsDriveConditionToZero) {
  const auto spec = EconomicSpec::reference_economy(10);
  Rng rng(6);
  const std::vector<double> factors{1.0, 0.5, 0.1, 0.01, 0.001};
  const auto r = check_shrinking_priors(spec, 10, factors, 100, rng);
  EXPECT_TRUE(r.passed()) << r.summary;
}

TEST(Suites, RunAllFromConfig) {
  auto c = default_run_config();
  c.check.monotonicity_instances = 20;
  c.check.dominance_instances = 20;
  c.check.dic_instances = 10;
  c.check.monotone_net_points = 50;
  c.check.monotone_net_draws = 2;
  c.check.feasibility_instances = 20;
  const auto reports = run_check_suites(c);
  ASSERT_EQ(reports.size(), 7u);
  for (const auto& r : reports) EXPECT_TRUE(r.passed()) << r.name << ": " << r.summary;
  const auto m = small_model(4, 1);
  EXPECT_THROW(run_check_suites(c, &m), ConfigError);
}

}  // namespace
}  // namespace fvcg
