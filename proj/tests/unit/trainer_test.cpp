#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fvcg/errors.hpp"
#include "fvcg/trainer.hpp"
#include "gradient_check.hpp"

namespace fvcg {
namespace {

TrainingConfig tiny_config() {
  TrainingConfig c;
  c.batch_size = 4;
  c.h_hidden = {5, 4};
  c.g_hidden = 6;
  c.iterations = 5;
  c.seed = 3;
  return c;
}

std::vector<double> tenths() {
  std::vector<double> g;
  for (int k = 1; k <= 10; ++k) g.push_back(k / 10.0);
  return g;
}

TEST(SampleBatch, DrawsFromPriors) {
  const auto spec = EconomicSpec::reference_economy(10);
  Rng rng(1);
  const auto batch = sample_batch(spec, 10, 100, rng);
  ASSERT_EQ(batch.size(), 100u);
  for (const auto& inst : batch) {
    ASSERT_EQ(inst.size(), 10u);
    for (double q : inst.q) EXPECT_TRUE(q >= 0.0 && q <= 5.0);
    for (double g : inst.gamma) EXPECT_TRUE(g >= 0.0 && g <= 1.0);
  }
}

TEST(SampleBatch, DegenerateRangeAndDeterminism) {
  const auto spec = EconomicSpec::sqrt_sum(2.0, {1.5, 1.5}, {0.25, 0.25});
  Rng rng(9);
  for (const auto& inst : sample_batch(spec, 3, 5, rng)) {
    for (double q : inst.q) EXPECT_EQ(q, 1.5);
    for (double g : inst.gamma) EXPECT_EQ(g, 0.25);
  }
  const auto wide = EconomicSpec::reference_economy(4);
  Rng a(5);
  Rng b(5);
  const auto ba = sample_batch(wide, 4, 10, a);
  const auto bb = sample_batch(wide, 4, 10, b);
  for (std::size_t t = 0; t < 10; ++t) {
    EXPECT_EQ(ba[t].q, bb[t].q);
    EXPECT_EQ(ba[t].gamma, bb[t].gamma);
  }
}

TEST(Precompute, CapturesMechanismQuantities) {
  const auto spec = EconomicSpec::reference_economy(10);
  const Instance t1(std::vector<double>(10, 1.0), tenths());
  const std::vector<Instance> batch{t1};
  const auto pre = precompute(spec, batch);
  ASSERT_EQ(pre.size(), 1u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(pre[0].vcg.tau[i], 0.67, 0.005);
  for (int i = 6; i < 10; ++i) EXPECT_EQ(pre[0].vcg.tau[i], 0.0);
}

TEST(Precompute, ErrorsNameTheSample) {
  EconomicSpec spec = EconomicSpec::reference_economy(2);
  spec.revenue = CustomRevenue{[](std::span<const double>) { return std::nan(""); },
                               [](std::span<const double> x) {
                                 return std::vector<double>(x.size(), std::nan(""));
                               }};
  const std::vector<Instance> batch{Instance({1, 1}, {0.5, 0.5})};
  try {
    precompute(spec, batch);
    FAIL() << "expected a numerical error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("sample 0"), std::string::npos);
  }
}

TEST(Features, OthersInOwnerOrderQualityFirst) {
  const auto spec = EconomicSpec::reference_economy(3);
  const Instance inst({1.0, 2.5, 5.0}, {0.2, 0.4, 0.6});
  EXPECT_EQ(others_features(spec, inst, 1), (std::vector<double>{0.2, 1.0, 0.2, 0.6}));
  EXPECT_THROW(others_features(spec, inst, 3), DimensionError);
}

TEST(Adjustment, ZeroParameterNetsGiveZero) {
  const auto spec = EconomicSpec::reference_economy(3);
  AdjustmentModel m;
  m.n = 3;
  m.h_net = DenseNet({4, 3, 1});
  m.g_net = MonotonicNet(4);
  EXPECT_EQ(adjustments(spec, m, Instance({1, 2, 3}, {0.1, 0.2, 0.3})),
            (std::vector<double>(3, 0.0)));
  EXPECT_THROW(adjustment(spec, m, Instance({1, 2}, {0.1, 0.2}), 0), DimensionError);
}

TEST(Adjustment, SharedParametersMoveEveryOwner) {
  const auto spec = EconomicSpec::reference_economy(4);
  Rng rng(2);
  const auto config = tiny_config();
  auto m = initial_model(spec, 4, config, rng);
  const Instance inst({1, 2, 3, 4}, {0.1, 0.2, 0.3, 0.4});
  const auto before = adjustments(spec, m, inst);
  // Whichever hidden units are live for an owner, the shared output bias
  // and the shared g weights reach every one of them.
  m.h_net.output_bias() += 0.3;
  for (double& w : m.g_net.output_weights) w += 0.1;
  const auto after = adjustments(spec, m, inst);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NE(before[i], after[i]) << i;
}

TEST(InitialModel, StartsWithNonNegativeAdjustments) {
  const auto spec = EconomicSpec::reference_economy(10);
  TrainingConfig config;
  Rng rng(config.seed);
  const auto m = initial_model(spec, 10, config, rng);
  for (double w : m.h_net.layers().back().weights) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(m.h_net.layer_dims(), (std::vector<std::size_t>{18, 10, 10, 10, 1}));
  EXPECT_EQ(m.g_net.hidden_width(), 50u);
  Rng draws(4);
  for (const auto& inst : sample_batch(spec, 10, 20, draws)) {
    for (double a : adjustments(spec, m, inst)) EXPECT_GE(a, 0.0);
  }
}

TEST(Losses, WeightedSumMatchesPrintedTableTotals) {
  const TrainingConfig c;
  // Printed components are rounded to 4 decimals, so the recomputed total
  // can differ from the printed one by up to ~0.9e-4.
  const double tol = 1e-4;
  EXPECT_NEAR(weighted_loss(c, 0.0152, 0.0, 0.0), 0.0061, tol);
  EXPECT_NEAR(weighted_loss(c, 0.0175, 0.0, 0.0), 0.0070, tol);
  EXPECT_NEAR(weighted_loss(c, 0.0176, 0.0, 0.0), 0.0070, tol);
  EXPECT_NEAR(weighted_loss(c, 0.0153, 0.0, 0.0), 0.0061, tol);
  EXPECT_NEAR(weighted_loss(c, 0.0041, 0.0, 0.0), 0.0016, tol);
  EXPECT_NEAR(weighted_loss(c, 0.0196, 0.0, 0.0), 0.0078, tol);
  EXPECT_NEAR(weighted_loss(c, 0.0378, 0.0, 0.0), 0.0151, tol);
  EXPECT_NEAR(weighted_loss(c, 0.0432, 0.0, 0.4009), 0.1375, tol);
  EXPECT_DOUBLE_EQ(weighted_loss(c, 1.0, 2.0, 3.0), 0.4 + 0.6 + 0.9);
}

TEST(Losses, PenaltiesVanishWhenConstraintsHold) {
  const auto spec = EconomicSpec::reference_economy(10);
  const TrainingConfig c;
  Rng rng(6);
  const auto batch = precompute(spec, sample_batch(spec, 10, 50, rng));
  for (const auto& s : batch) {
    std::vector<double> adj(10);
    for (std::size_t i = 0; i < 10; ++i) {
      adj[i] = -s.vcg.marginal_contribution(i) + 0.5 * s.vcg.surplus_star / 10.0;
    }
    const auto r = sample_loss(spec, c, s, adj);
    EXPECT_EQ(r.loss2, 0.0);
    EXPECT_EQ(r.loss3, 0.0);
    EXPECT_NEAR(r.total, c.lambda1 * r.loss1, 1e-15);
  }
}

TEST(Losses, PenaltiesMeasureViolations) {
  const auto spec = EconomicSpec::reference_economy(2);
  const TrainingConfig c;
  const Instance inst({1.0, 1.0}, {0.0, 0.0});
  const auto pre = precompute(spec, std::vector<Instance>{inst});
  const auto& vcg = pre[0].vcg;
  // S* = 2, S^{-i*} = sqrt(2): marginal contributions 2 - sqrt(2) each.
  const double mc = 2.0 - std::sqrt(2.0);
  ASSERT_NEAR(vcg.marginal_contribution(0), mc, 1e-12);
  const auto low = sample_loss(spec, c, pre[0], std::vector<double>{-1.0, 0.0});
  EXPECT_NEAR(low.loss2, 1.0 - mc, 1e-12);
  const auto high = sample_loss(spec, c, pre[0], std::vector<double>{1.0, 1.0});
  EXPECT_NEAR(high.loss3, 2 * mc + 2.0 - 2.0, 1e-12);
}

TEST(Gradients, MatchFiniteDifferencesOnTinyBatch) {
  const auto spec = EconomicSpec::reference_economy(3);
  const auto config = tiny_config();
  Rng rng(21);
  const auto batch = precompute(spec, sample_batch(spec, 3, 4, rng));
  for (double bias : {-1.0, 0.2, 1.5}) {
    const auto model = testing::random_model(spec, 3, config, rng, bias);
    const auto r = testing::check_loss_gradients(spec, config, model, batch, 1e-4);
    EXPECT_GT(r.checked, 0u);
    for (const auto& m : r.mismatches) {
      ADD_FAILURE() << m.parameter << ": analytic " << m.analytic << " vs numeric " << m.numeric;
    }
  }
}

TEST(Gradients, ReportMatchesLossComponents) {
  const auto spec = EconomicSpec::reference_economy(4);
  const auto config = tiny_config();
  Rng rng(8);
  const auto batch = precompute(spec, sample_batch(spec, 4, 6, rng));
  const auto model = testing::random_model(spec, 4, config, rng, 0.5);
  const auto g = loss_and_gradients(spec, config, model, batch);
  const auto r = loss_components(spec, config, model, batch);
  EXPECT_NEAR(g.report.loss1, r.loss1, 1e-12);
  EXPECT_NEAR(g.report.loss2, r.loss2, 1e-12);
  EXPECT_NEAR(g.report.loss3, r.loss3, 1e-12);
  EXPECT_NEAR(g.report.total, weighted_loss(config, r.loss1, r.loss2, r.loss3), 1e-9);
  ASSERT_EQ(g.payments.size(), batch.size());
  for (std::size_t t = 0; t < batch.size(); ++t) {
    const auto adj = adjustments(spec, model, batch[t].instance);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_DOUBLE_EQ(g.payments[t][i], batch[t].vcg.tau[i] + adj[i]);
    }
  }
}

TEST(BiasBump, RaisesEveryPaymentByTheBump) {
  const auto spec = EconomicSpec::reference_economy(4);
  const auto config = tiny_config();
  Rng rng(10);
  auto model = initial_model(spec, 4, config, rng);
  const Instance inst({1, 2, 3, 4}, {0.3, 0.1, 0.9, 0.5});
  const auto before = adjustments(spec, model, inst);
  bump_output_bias(model, 1.0);
  const auto after = adjustments(spec, model, inst);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(after[i] - before[i], 1.0, 1e-12);
}

TEST(Train, ZeroIterationsKeepsTheInitialModel) {
  const auto spec = EconomicSpec::reference_economy(3);
  auto config = tiny_config();
  config.iterations = 0;
  const auto result = train(spec, 3, config);
  Rng rng(config.seed);
  EXPECT_EQ(result.model, initial_model(spec, 3, config, rng));
  EXPECT_TRUE(result.curve.empty());
}

TEST(Train, ZeroWeightsLeaveNetsUnchanged) {
  const auto spec = EconomicSpec::reference_economy(3);
  auto config = tiny_config();
  config.lambda1 = config.lambda2 = config.lambda3 = 0.0;
  const auto result = train(spec, 3, config);
  Rng rng(config.seed);
  EXPECT_EQ(result.model, initial_model(spec, 3, config, rng));
  for (const auto& r : result.curve) EXPECT_EQ(r.total, 0.0);
}

TEST(Train, EqualSeedsGiveIdenticalRuns) {
  const auto spec = EconomicSpec::reference_economy(4);
  auto config = tiny_config();
  config.iterations = 20;
  const auto a = train(spec, 4, config);
  const auto b = train(spec, 4, config);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(serialize_model(a.model), serialize_model(b.model));
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t k = 0; k < a.curve.size(); ++k) EXPECT_EQ(a.curve[k].total, b.curve[k].total);
  config.seed = 4;
  EXPECT_NE(train(spec, 4, config).model, a.model);
}

TEST(Train, MonotonicWeightsStayNonNegative) {
  const auto spec = EconomicSpec::reference_economy(4);
  auto config = tiny_config();
  config.iterations = 30;
  config.learning_rate = 0.5;  // large steps push weights into the projection
  std::size_t calls = 0;
  const auto result = train(spec, 4, config, [&](std::size_t, const LossReport&) { ++calls; });
  EXPECT_EQ(calls, 30u);
  EXPECT_NO_THROW(result.model.g_net.check_weights());
  for (double w : result.model.g_net.hidden_weights) EXPECT_GE(w, 0.0);
  for (double w : result.model.g_net.output_weights) EXPECT_GE(w, 0.0);
}

TEST(Train, NonFiniteLossAbortsWithIteration) {
  EconomicSpec spec = EconomicSpec::reference_economy(3);
  spec.unfairness = CustomUnfairness{
      [](std::span<const double>, const Instance&) { return std::nan(""); },
      [](std::span<const double> p, const Instance&) { return std::vector<double>(p.size(), 0.0); }};
  try {
    train(spec, 3, tiny_config());
    FAIL() << "expected the run to abort";
  } catch (const TrainingAborted& e) {
    EXPECT_EQ(e.iteration(), 0u);
    EXPECT_TRUE(e.curve().empty());
  }
}

TEST(Train, RejectsInvalidConfig) {
  const auto spec = EconomicSpec::reference_economy(3);
  auto config = tiny_config();
  config.learning_rate = 0.0;
  EXPECT_THROW(train(spec, 3, config), ConfigError);
  config = tiny_config();
  config.lambda2 = -1.0;
  EXPECT_THROW(train(spec, 3, config), ConfigError);
}

}  // namespace
}  // namespace fvcg
