#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fvcg/rng.hpp"

namespace fvcg {

// One affine layer; weights are row-major `out x in`.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  double& weight(std::size_t row, std::size_t col) { return weights[row * in + col]; }
  double weight(std::size_t row, std::size_t col) const { return weights[row * in + col]; }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Fully connected net with rectifier hidden layers and a scalar affine
// output. layer_dims = {input, hidden..., 1}.
class DenseNet {
 public:
  DenseNet() = default;
  // All parameters zero.
  explicit DenseNet(std::vector<std::size_t> layer_dims);

  const std::vector<std::size_t>& layer_dims() const { return dims_; }
  std::size_t input_dim() const { return dims_.empty() ? 0 : dims_.front(); }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  double& output_bias() { return layers_.back().biases.front(); }
  double output_bias() const { return layers_.back().biases.front(); }

  std::size_t parameter_count() const;

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<DenseLayer> layers_;
};

// Single hidden layer of logistic units, non-negative weights everywhere and
// no output bias, so the map x -> f(x) is non-decreasing and f == 0 when all
// weights are zero.
struct MonotonicNet {
  MonotonicNet() = default;
  // All parameters zero.
  explicit MonotonicNet(std::size_t hidden_width);

  std::size_t hidden_width() const { return hidden_weights.size(); }
  std::size_t parameter_count() const { return 3 * hidden_width(); }

  // Throws InvariantError if any weight is negative.
  void check_weights() const;

  std::vector<double> hidden_weights;  // input -> hidden, >= 0
  std::vector<double> hidden_biases;
  std::vector<double> output_weights;  // hidden -> output, >= 0

  friend bool operator==(const MonotonicNet&, const MonotonicNet&) = default;
};

double logistic(double x);

struct DenseGradients {
  std::vector<DenseLayer> layers;  // d/dweights, d/dbiases, same shapes as the net
  std::vector<double> input;

  static DenseGradients zeros_like(const DenseNet& net);
  void scale(double factor);
};

struct MonotonicGradients {
  std::vector<double> hidden_weights;
  std::vector<double> hidden_biases;
  std::vector<double> output_weights;
  double input = 0.0;

  static MonotonicGradients zeros_like(const MonotonicNet& net);
  void scale(double factor);
};

// Intermediate values of one forward pass, kept for the backward pass.
struct DenseTape {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;   // affine output per layer
  std::vector<std::vector<double>> post;  // activation per layer (== pre for the last)
};

struct MonotonicTape {
  double input = 0.0;
  std::vector<double> hidden;  // logistic activations
};

double forward_dense(const DenseNet& net, std::span<const double> x, DenseTape* tape = nullptr);
double forward_monotonic(const MonotonicNet& net, double x, MonotonicTape* tape = nullptr);

// Adds upstream * d output / d parameter (and input) into `grads`.
void accumulate_backward(const DenseNet& net, const DenseTape& tape, double upstream,
                         DenseGradients& grads);
void accumulate_backward(const MonotonicNet& net, const MonotonicTape& tape, double upstream,
                         MonotonicGradients& grads);

// Gradients of upstream * net(x).
DenseGradients backward(const DenseNet& net, std::span<const double> x, double upstream);
MonotonicGradients backward(const MonotonicNet& net, double x, double upstream);

// Plain gradient descent. The monotonic variant projects weights onto
// w >= 0 after the step.
void sgd_step(DenseNet& net, const DenseGradients& grads, double learning_rate);
void sgd_step(MonotonicNet& net, const MonotonicGradients& grads, double learning_rate);

// Glorot-uniform: dense weights in [-r, r], r = sqrt(6 / (fan_in + fan_out)),
// biases zero. Monotonic weights in [0, r]; hidden biases in [-r, r].
DenseNet init_dense(std::vector<std::size_t> layer_dims, Rng& rng);
MonotonicNet init_monotonic(std::size_t hidden_width, Rng& rng);

// JSON text; every number is written as a decimal string with 17
// significant digits so deserialize(serialize(net)) is bit-exact.
std::string serialize(const DenseNet& net);
std::string serialize(const MonotonicNet& net);
DenseNet deserialize_dense(const std::string& text);
MonotonicNet deserialize_monotonic(const std::string& text);

}  // namespace fvcg
