#include "fvcg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fvcg {

namespace {

double relu(double x) { return x > 0.0 ? x : 0.0; }

double normalize(const UniformRange& range, double v) {
  return range.degenerate() ? 0.0 : (v - range.lo) / range.width();
}

}  // namespace

void TrainingConfig::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0) {
    throw ConfigError("penalty weights must be non-negative");
  }
  if (batch_size < 1) throw ConfigError("batch size T must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(bias_bump > 0.0)) throw ConfigError("bias bump b must be positive");
  if (g_hidden < 1) throw ConfigError("g net needs at least one hidden unit");
  if (!std::isfinite(g_bias_offset)) throw ConfigError("g bias offset must be finite");
  for (std::size_t w : h_hidden) {
    if (w < 1) throw ConfigError("h net hidden widths must be positive");
  }
}

double weighted_loss(const TrainingConfig& config, double loss1, double loss2, double loss3) {
  return config.lambda1 * loss1 + config.lambda2 * loss2 + config.lambda3 * loss3;
}

double normalize_quality(const EconomicSpec& spec, double q) { return normalize(spec.prior_q, q); }

double normalize_cost_type(const EconomicSpec& spec, double gamma) {
  return normalize(spec.prior_gamma, gamma);
}

std::vector<double> others_features(const EconomicSpec& spec, const Instance& inst,
                                    std::size_t owner) {
  const std::size_t n = inst.size();
  if (owner >= n) throw DimensionError("owner index out of range");
  std::vector<double> x;
  x.reserve(2 * (n - 1));
  for (std::size_t k = 0; k < n; ++k) {
    if (k != owner) x.push_back(normalize_quality(spec, inst.q[k]));
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k != owner) x.push_back(normalize_cost_type(spec, inst.gamma[k]));
  }
  return x;
}

AdjustmentModel initial_model(const EconomicSpec& spec, std::size_t n,
                              const TrainingConfig& config, Rng& rng) {
  if (n == 0) throw ConfigError("economy needs at least one owner");
  std::vector<std::size_t> dims{2 * (n - 1)};
  dims.insert(dims.end(), config.h_hidden.begin(), config.h_hidden.end());
  dims.push_back(1);
  AdjustmentModel model;
  model.spec_hash = spec_hash(spec, n);
  model.n = n;
  model.h_net = init_dense(std::move(dims), rng);
  model.g_net = init_monotonic(config.g_hidden, rng);
  if (config.zero_h_output) {
    auto& last = model.h_net.layers().back();
    std::fill(last.weights.begin(), last.weights.end(), 0.0);
  }
  for (double& b : model.g_net.hidden_biases) b += config.g_bias_offset;
  return model;
}

std::vector<Instance> sample_batch(const EconomicSpec& spec, std::size_t n, std::size_t batch_size,
                                   Rng& rng) {
  std::vector<Instance> batch;
  batch.reserve(batch_size);
  for (std::size_t t = 0; t < batch_size; ++t) {
    std::vector<double> q(n);
    std::vector<double> gamma(n);
    for (double& v : q) v = rng.uniform(spec.prior_q.lo, spec.prior_q.hi);
    for (double& v : gamma) v = rng.uniform(spec.prior_gamma.lo, spec.prior_gamma.hi);
    batch.emplace_back(std::move(q), std::move(gamma));
  }
  return batch;
}

std::vector<PrecomputedSample> precompute(const EconomicSpec& spec,
                                          std::span<const Instance> batch) {
  std::vector<PrecomputedSample> out;
  out.reserve(batch.size());
  for (std::size_t t = 0; t < batch.size(); ++t) {
    try {
      out.push_back({batch[t], vcg_payment_vector(spec, batch[t])});
    } catch (const UnsupportedEconomyError& e) {
      throw UnsupportedEconomyError("sample " + std::to_string(t) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("sample " + std::to_string(t) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("sample " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

double adjustment(const EconomicSpec& spec, const AdjustmentModel& model, const Instance& inst,
                  std::size_t owner) {
  if (inst.size() != model.n) {
    throw DimensionError("model was built for n=" + std::to_string(model.n) +
                         " but the instance has " + std::to_string(inst.size()) + " owners");
  }
  const auto x = others_features(spec, inst, owner);
  return forward_dense(model.h_net, x) +
         forward_monotonic(model.g_net, normalize_quality(spec, inst.q[owner]));
}

std::vector<double> adjustments(const EconomicSpec& spec, const AdjustmentModel& model,
                                const Instance& inst) {
  std::vector<double> out(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) out[i] = adjustment(spec, model, inst, i);
  return out;
}

LossReport sample_loss(const EconomicSpec& spec, const TrainingConfig& config,
                       const PrecomputedSample& sample, std::span<const double> adj) {
  const auto& vcg = sample.vcg;
  const std::size_t n = vcg.size();
  if (adj.size() != n) throw DimensionError("adjustments do not match the sample");

  std::vector<double> payments(n);
  double ir = 0.0;
  double budget = -vcg.surplus_star;
  for (std::size_t i = 0; i < n; ++i) {
    payments[i] = vcg.tau[i] + adj[i];
    ir += relu(-vcg.marginal_contribution(i) - adj[i]);
    budget += vcg.marginal_contribution(i) + adj[i];
  }
  LossReport r;
  r.loss1 = unfairness(spec, payments, sample.instance);
  r.loss2 = ir;
  r.loss3 = relu(budget);
  r.total = weighted_loss(config, r.loss1, r.loss2, r.loss3);
  return r;
}

LossReport loss_components(const EconomicSpec& spec, const TrainingConfig& config,
                           const AdjustmentModel& model, std::span<const PrecomputedSample> batch) {
  if (batch.empty()) throw DimensionError("loss needs a non-empty batch");
  LossReport mean;
  for (const auto& sample : batch) {
    const auto adj = adjustments(spec, model, sample.instance);
    const auto r = sample_loss(spec, config, sample, adj);
    mean.loss1 += r.loss1;
    mean.loss2 += r.loss2;
    mean.loss3 += r.loss3;
  }
  const double t = static_cast<double>(batch.size());
  mean.loss1 /= t;
  mean.loss2 /= t;
  mean.loss3 /= t;
  mean.total = weighted_loss(config, mean.loss1, mean.loss2, mean.loss3);
  return mean;
}

LossGradients loss_and_gradients(const EconomicSpec& spec, const TrainingConfig& config,
                                 const AdjustmentModel& model,
                                 std::span<const PrecomputedSample> batch) {
  if (batch.empty()) throw DimensionError("loss needs a non-empty batch");
  LossGradients out;
  out.h = DenseGradients::zeros_like(model.h_net);
  out.g = MonotonicGradients::zeros_like(model.g_net);
  out.payments.reserve(batch.size());
  const double inv_t = 1.0 / static_cast<double>(batch.size());

  std::vector<DenseTape> h_tapes;
  std::vector<MonotonicTape> g_tapes;
  for (const auto& sample : batch) {
    const auto& inst = sample.instance;
    const auto& vcg = sample.vcg;
    const std::size_t n = inst.size();
    if (n != model.n) throw DimensionError("sample size does not match the model");

    h_tapes.resize(n);
    g_tapes.resize(n);
    std::vector<double> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = others_features(spec, inst, i);
      adj[i] = forward_dense(model.h_net, x, &h_tapes[i]) +
               forward_monotonic(model.g_net, normalize_quality(spec, inst.q[i]), &g_tapes[i]);
    }
    const LossReport r = sample_loss(spec, config, sample, adj);
    out.report.loss1 += r.loss1 * inv_t;
    out.report.loss2 += r.loss2 * inv_t;
    out.report.loss3 += r.loss3 * inv_t;

    std::vector<double> payments(n);
    double budget = -vcg.surplus_star;
    for (std::size_t i = 0; i < n; ++i) {
      payments[i] = vcg.tau[i] + adj[i];
      budget += vcg.marginal_contribution(i) + adj[i];
    }
    std::vector<double> d_unfair(n, 0.0);
    if (config.lambda1 != 0.0) d_unfair = unfairness_gradient(spec, payments, inst);
    const bool wbb_active = budget > 0.0;

    for (std::size_t i = 0; i < n; ++i) {
      double d = config.lambda1 * d_unfair[i];
      if (-vcg.marginal_contribution(i) - adj[i] > 0.0) d -= config.lambda2;
      if (wbb_active) d += config.lambda3;
      d *= inv_t;
      if (d == 0.0) continue;
      accumulate_backward(model.h_net, h_tapes[i], d, out.h);
      accumulate_backward(model.g_net, g_tapes[i], d, out.g);
    }
    out.payments.push_back(std::move(payments));
  }
  out.report.total =
      weighted_loss(config, out.report.loss1, out.report.loss2, out.report.loss3);
  return out;
}

void bump_output_bias(AdjustmentModel& model, double amount) { model.h_net.output_bias() += amount; }

TrainingAborted::TrainingAborted(std::size_t iteration, std::vector<LossReport> curve,
                                 const std::string& why)
    : NumericalError("training aborted at iteration " + std::to_string(iteration) + ": " + why),
      iteration_(iteration),
      curve_(std::move(curve)) {}

TrainingResult train(const EconomicSpec& spec, std::size_t n, const TrainingConfig& config,
                     const IterationCallback& on_iteration) {
  config.validate();
  spec.validate();
  Rng rng(config.seed);
  TrainingResult result;
  result.model = initial_model(spec, n, config, rng);
  result.curve.reserve(config.iterations);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    LossGradients step;
    try {
      const auto batch = sample_batch(spec, n, config.batch_size, rng);
      const auto samples = precompute(spec, batch);
      step = loss_and_gradients(spec, config, result.model, samples);
    } catch (const NumericalError& e) {
      throw TrainingAborted(it, result.curve, e.what());
    } catch (const DegenerateRatioError& e) {
      throw TrainingAborted(it, result.curve, e.what());
    }
    const auto& r = step.report;
    if (!std::isfinite(r.total) || !std::isfinite(r.loss1) || !std::isfinite(r.loss2) ||
        !std::isfinite(r.loss3)) {
      throw TrainingAborted(it, result.curve, "non-finite loss");
    }
    result.curve.push_back(r);
    if (on_iteration) on_iteration(it, r);

    sgd_step(result.model.h_net, step.h, config.learning_rate);
    sgd_step(result.model.g_net, step.g, config.learning_rate);

    const bool negative_payment = std::any_of(
        step.payments.begin(), step.payments.end(), [](const std::vector<double>& p) {
          return std::any_of(p.begin(), p.end(), [](double v) { return v < 0.0; });
        });
    if (negative_payment) bump_output_bias(result.model, config.bias_bump);
  }
  return result;
}

}  // namespace fvcg
