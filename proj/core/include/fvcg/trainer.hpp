#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fvcg/econ.hpp"
#include "fvcg/errors.hpp"
#include "fvcg/model.hpp"
#include "fvcg/neuralnet.hpp"
#include "fvcg/rng.hpp"
#include "fvcg/vcg.hpp"

namespace fvcg {

struct TrainingConfig {
  double lambda1 = 0.4;  // unfairness
  double lambda2 = 0.3;  // individual rationality penalty
  double lambda3 = 0.3;  // weak budget balance penalty
  std::size_t batch_size = 100;
  double learning_rate = 0.001;
  double bias_bump = 1.0;
  std::size_t iterations = 200;
  std::uint64_t seed = 42;
  std::vector<std::size_t> h_hidden{10, 10, 10};
  std::size_t g_hidden = 50;
  // Start-up shape of the adjustment. With the h output layer zeroed, every
  // initial adjustment equals g(q_i) >= 0, so no payment starts negative and
  // the bias bump only fires if training itself drives a payment below zero.
  // Shifting g's hidden biases down starts its units in the lower logistic
  // tail, so the initial adjustment is O(0.5) rather than O(4).
  bool zero_h_output = true;
  double g_bias_offset = -3.0;

  void validate() const;
};

// One training instance together with the mechanism quantities that stay
// fixed while the networks change.
struct PrecomputedSample {
  Instance instance;
  VcgComputation vcg;
};

struct LossReport {
  double loss1 = 0.0;  // unfairness
  double loss2 = 0.0;  // sum_i relu(-(S* - S^{-i*}) - adj_i)
  double loss3 = 0.0;  // relu(sum_i [(S* - S^{-i*}) + adj_i] - S*)
  double total = 0.0;  // lambda-weighted sum
};

// lambda1 * loss1 + lambda2 * loss2 + lambda3 * loss3.
double weighted_loss(const TrainingConfig& config, double loss1, double loss2, double loss3);

// Maps reports onto [0,1] using the prior ranges (0 for a degenerate range).
double normalize_quality(const EconomicSpec& spec, double q);
double normalize_cost_type(const EconomicSpec& spec, double gamma);

// Input of the shared h net for owner i: normalized q^{-i} followed by
// normalized gamma^{-i}, both in original owner order.
std::vector<double> others_features(const EconomicSpec& spec, const Instance& inst,
                                    std::size_t owner);

// Fresh nets: h is {2(n-1), h_hidden..., 1}, g has g_hidden logistic units.
// Glorot-uniform draws, then `zero_h_output` and `g_bias_offset` applied.
AdjustmentModel initial_model(const EconomicSpec& spec, std::size_t n,
                              const TrainingConfig& config, Rng& rng);

std::vector<Instance> sample_batch(const EconomicSpec& spec, std::size_t n, std::size_t batch_size,
                                   Rng& rng);

// Errors from the solver are rethrown with the sample index attached.
std::vector<PrecomputedSample> precompute(const EconomicSpec& spec,
                                          std::span<const Instance> batch);

// h_i + g_i for one owner.
double adjustment(const EconomicSpec& spec, const AdjustmentModel& model, const Instance& inst,
                  std::size_t owner);
std::vector<double> adjustments(const EconomicSpec& spec, const AdjustmentModel& model,
                                const Instance& inst);

// Per-sample loss terms (unweighted total uses `config`'s lambdas).
LossReport sample_loss(const EconomicSpec& spec, const TrainingConfig& config,
                       const PrecomputedSample& sample, std::span<const double> adjustments);

// Batch mean of the per-sample losses.
LossReport loss_components(const EconomicSpec& spec, const TrainingConfig& config,
                           const AdjustmentModel& model, std::span<const PrecomputedSample> batch);

struct LossGradients {
  LossReport report;
  DenseGradients h;
  MonotonicGradients g;
  // Payments tau_i + adj_i seen during the forward pass, per sample.
  std::vector<std::vector<double>> payments;
};

// Batch loss and its exact gradient w.r.t. every network parameter.
// Rectifier subgradients are 0 at the kink.
LossGradients loss_and_gradients(const EconomicSpec& spec, const TrainingConfig& config,
                                 const AdjustmentModel& model,
                                 std::span<const PrecomputedSample> batch);

// Adds `amount` to the shared h output bias, raising every adjustment by it.
void bump_output_bias(AdjustmentModel& model, double amount);

struct TrainingResult {
  AdjustmentModel model;
  std::vector<LossReport> curve;
};

// Raised when the loss turns non-finite; carries the curve up to that point.
class TrainingAborted : public NumericalError {
 public:
  TrainingAborted(std::size_t iteration, std::vector<LossReport> curve, const std::string& why);
  std::size_t iteration() const { return iteration_; }
  const std::vector<LossReport>& curve() const { return curve_; }

 private:
  std::size_t iteration_;
  std::vector<LossReport> curve_;
};

using IterationCallback = std::function<void(std::size_t iteration, const LossReport& report)>;

// Per iteration: draw a fresh batch, precompute the mechanism quantities,
// take one full-batch gradient step (projecting g's weights onto w >= 0),
// then, if any payment tau_i + adj_i in the batch was negative, raise the h
// output bias by `bias_bump` (at most once per iteration).
TrainingResult train(const EconomicSpec& spec, std::size_t n, const TrainingConfig& config,
                     const IterationCallback& on_iteration = {});

}  // namespace fvcg
