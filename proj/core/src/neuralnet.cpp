#include "fvcg/neuralnet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "fvcg/errors.hpp"
#include "json_codec.hpp"

namespace fvcg {

namespace {

DenseLayer zero_layer(std::size_t in, std::size_t out) {
  DenseLayer layer;
  layer.in = in;
  layer.out = out;
  layer.weights.assign(in * out, 0.0);
  layer.biases.assign(out, 0.0);
  return layer;
}

void require_finite(double v, const char* where) {
  if (!std::isfinite(v)) throw NumericalError(std::string("non-finite value in ") + where);
}

}  // namespace

DenseNet::DenseNet(std::vector<std::size_t> layer_dims) : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2) throw DimensionError("dense net needs at least input and output dims");
  if (dims_.back() != 1) throw DimensionError("dense net output must be scalar");
  // A zero-width input is allowed: the net is then a constant (n = 1 owners).
  for (std::size_t l = 1; l < dims_.size(); ++l) {
    if (dims_[l] == 0) throw DimensionError("dense net layer width must be positive");
  }
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    layers_.push_back(zero_layer(dims_[l], dims_[l + 1]));
  }
}

std::size_t DenseNet::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers_) count += layer.weights.size() + layer.biases.size();
  return count;
}

MonotonicNet::MonotonicNet(std::size_t hidden_width)
    : hidden_weights(hidden_width, 0.0),
      hidden_biases(hidden_width, 0.0),
      output_weights(hidden_width, 0.0) {
  if (hidden_width == 0) throw DimensionError("monotonic net needs a non-empty hidden layer");
}

void MonotonicNet::check_weights() const {
  if (hidden_biases.size() != hidden_width() || output_weights.size() != hidden_width()) {
    throw DimensionError("monotonic net parameter shapes disagree");
  }
  for (std::size_t k = 0; k < hidden_width(); ++k) {
    if (hidden_weights[k] < 0.0 || output_weights[k] < 0.0) {
      throw InvariantError("monotonic net has a negative weight at hidden unit " +
                           std::to_string(k));
    }
  }
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

DenseGradients DenseGradients::zeros_like(const DenseNet& net) {
  DenseGradients g;
  for (const auto& layer : net.layers()) g.layers.push_back(zero_layer(layer.in, layer.out));
  g.input.assign(net.input_dim(), 0.0);
  return g;
}

void DenseGradients::scale(double factor) {
  for (auto& layer : layers) {
    for (double& w : layer.weights) w *= factor;
    for (double& b : layer.biases) b *= factor;
  }
  for (double& x : input) x *= factor;
}

MonotonicGradients MonotonicGradients::zeros_like(const MonotonicNet& net) {
  MonotonicGradients g;
  g.hidden_weights.assign(net.hidden_width(), 0.0);
  g.hidden_biases.assign(net.hidden_width(), 0.0);
  g.output_weights.assign(net.hidden_width(), 0.0);
  return g;
}

void MonotonicGradients::scale(double factor) {
  for (double& w : hidden_weights) w *= factor;
  for (double& b : hidden_biases) b *= factor;
  for (double& w : output_weights) w *= factor;
  input *= factor;
}

double forward_dense(const DenseNet& net, std::span<const double> x, DenseTape* tape) {
  if (x.size() != net.input_dim()) {
    throw DimensionError("dense net expects input of size " + std::to_string(net.input_dim()) +
                         ", got " + std::to_string(x.size()));
  }
  std::vector<double> act(x.begin(), x.end());
  if (tape) {
    tape->input = act;
    tape->pre.clear();
    tape->post.clear();
  }
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    std::vector<double> z(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      double s = layer.biases[r];
      for (std::size_t c = 0; c < layer.in; ++c) s += layer.weight(r, c) * act[c];
      require_finite(s, "dense forward pass");
      z[r] = s;
    }
    const bool hidden = l + 1 < layers.size();
    std::vector<double> a = z;
    if (hidden) {
      for (double& v : a) v = std::max(0.0, v);
    }
    if (tape) {
      tape->pre.push_back(std::move(z));
      tape->post.push_back(a);
    }
    act = std::move(a);
  }
  return act.front();
}

double forward_monotonic(const MonotonicNet& net, double x, MonotonicTape* tape) {
  net.check_weights();
  if (tape) {
    tape->input = x;
    tape->hidden.resize(net.hidden_width());
  }
  double out = 0.0;
  for (std::size_t k = 0; k < net.hidden_width(); ++k) {
    const double h = logistic(net.hidden_weights[k] * x + net.hidden_biases[k]);
    if (tape) tape->hidden[k] = h;
    out += net.output_weights[k] * h;
  }
  require_finite(out, "monotonic forward pass");
  return out;
}

void accumulate_backward(const DenseNet& net, const DenseTape& tape, double upstream,
                         DenseGradients& grads) {
  const auto& layers = net.layers();
  if (tape.pre.size() != layers.size()) throw DimensionError("tape does not match dense net");
  require_finite(upstream, "upstream gradient");
  std::vector<double> delta{upstream};  // d out / d z for the current layer
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    auto& g = grads.layers[l];
    const std::vector<double>& below = l == 0 ? tape.input : tape.post[l - 1];
    std::vector<double> d_below(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double d = delta[r];
      if (d == 0.0) continue;
      g.biases[r] += d;
      for (std::size_t c = 0; c < layer.in; ++c) {
        g.weight(r, c) += d * below[c];
        d_below[c] += d * layer.weight(r, c);
      }
    }
    if (l > 0) {
      // Rectifier; subgradient 0 at the kink.
      const auto& pre_below = tape.pre[l - 1];
      for (std::size_t c = 0; c < layer.in; ++c) {
        if (!(pre_below[c] > 0.0)) d_below[c] = 0.0;
      }
    } else {
      for (std::size_t c = 0; c < layer.in; ++c) grads.input[c] += d_below[c];
    }
    for (double v : d_below) require_finite(v, "dense backward pass");
    delta = std::move(d_below);
  }
}

void accumulate_backward(const MonotonicNet& net, const MonotonicTape& tape, double upstream,
                         MonotonicGradients& grads) {
  require_finite(upstream, "upstream gradient");
  if (tape.hidden.size() != net.hidden_width()) {
    throw DimensionError("tape does not match monotonic net");
  }
  for (std::size_t k = 0; k < net.hidden_width(); ++k) {
    const double h = tape.hidden[k];
    grads.output_weights[k] += upstream * h;
    const double dz = upstream * net.output_weights[k] * h * (1.0 - h);
    grads.hidden_biases[k] += dz;
    grads.hidden_weights[k] += dz * tape.input;
    grads.input += dz * net.hidden_weights[k];
    require_finite(dz, "monotonic backward pass");
  }
}

DenseGradients backward(const DenseNet& net, std::span<const double> x, double upstream) {
  DenseTape tape;
  forward_dense(net, x, &tape);
  auto grads = DenseGradients::zeros_like(net);
  accumulate_backward(net, tape, upstream, grads);
  return grads;
}

MonotonicGradients backward(const MonotonicNet& net, double x, double upstream) {
  MonotonicTape tape;
  forward_monotonic(net, x, &tape);
  auto grads = MonotonicGradients::zeros_like(net);
  accumulate_backward(net, tape, upstream, grads);
  return grads;
}

void sgd_step(DenseNet& net, const DenseGradients& grads, double learning_rate) {
  auto& layers = net.layers();
  if (grads.layers.size() != layers.size()) throw DimensionError("gradient shape mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = layers[l];
    const auto& g = grads.layers[l];
    if (g.weights.size() != layer.weights.size() || g.biases.size() != layer.biases.size()) {
      throw DimensionError("gradient shape mismatch in layer " + std::to_string(l));
    }
    for (std::size_t k = 0; k < layer.weights.size(); ++k) layer.weights[k] -= learning_rate * g.weights[k];
    for (std::size_t k = 0; k < layer.biases.size(); ++k) layer.biases[k] -= learning_rate * g.biases[k];
  }
}

void sgd_step(MonotonicNet& net, const MonotonicGradients& grads, double learning_rate) {
  const std::size_t h = net.hidden_width();
  if (grads.hidden_weights.size() != h || grads.hidden_biases.size() != h ||
      grads.output_weights.size() != h) {
    throw DimensionError("gradient shape mismatch");
  }
  for (std::size_t k = 0; k < h; ++k) {
    net.hidden_weights[k] = std::max(0.0, net.hidden_weights[k] - learning_rate * grads.hidden_weights[k]);
    net.hidden_biases[k] -= learning_rate * grads.hidden_biases[k];
    net.output_weights[k] = std::max(0.0, net.output_weights[k] - learning_rate * grads.output_weights[k]);
  }
}

DenseNet init_dense(std::vector<std::size_t> layer_dims, Rng& rng) {
  DenseNet net(std::move(layer_dims));
  for (auto& layer : net.layers()) {
    const double r = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (double& w : layer.weights) w = rng.uniform(-r, r);
  }
  return net;
}

MonotonicNet init_monotonic(std::size_t hidden_width, Rng& rng) {
  MonotonicNet net(hidden_width);
  const double r = std::sqrt(6.0 / static_cast<double>(1 + hidden_width));
  for (std::size_t k = 0; k < hidden_width; ++k) {
    net.hidden_weights[k] = rng.uniform(0.0, r);
    net.hidden_biases[k] = rng.uniform(-r, r);
    net.output_weights[k] = rng.uniform(0.0, r);
  }
  return net;
}

std::string serialize(const DenseNet& net) { return detail::encode(net).dump(); }

std::string serialize(const MonotonicNet& net) { return detail::encode(net).dump(); }

DenseNet deserialize_dense(const std::string& text) {
  try {
    return detail::decode_dense(detail::Json::parse(text));
  } catch (const detail::Json::exception& e) {
    throw ParseError(std::string("malformed dense net: ") + e.what());
  }
}

MonotonicNet deserialize_monotonic(const std::string& text) {
  try {
    return detail::decode_monotonic(detail::Json::parse(text));
  } catch (const detail::Json::exception& e) {
    throw ParseError(std::string("malformed monotonic net: ") + e.what());
  }
}

namespace detail {

std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_exact(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ParseError("expected a decimal string");
  const auto& s = j.get_ref<const std::string&>();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError("not a decimal number: '" + s + "'");
  }
  return v;
}

Json encode_vector(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(format_exact(x));
  return arr;
}

std::vector<double> decode_vector(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(parse_exact(x));
  return out;
}

Json encode(const DenseNet& net) {
  Json j;
  j["dims"] = net.layer_dims();
  Json weights = Json::array();
  Json biases = Json::array();
  for (const auto& layer : net.layers()) {
    weights.push_back(encode_vector(layer.weights));
    biases.push_back(encode_vector(layer.biases));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  return j;
}

Json encode(const MonotonicNet& net) {
  Json j;
  j["dims"] = std::vector<std::size_t>{1, net.hidden_width(), 1};
  j["weights"] = Json::array({encode_vector(net.hidden_weights), encode_vector(net.output_weights)});
  j["hidden_biases"] = encode_vector(net.hidden_biases);
  return j;
}

DenseNet decode_dense(const Json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("weights") || !j.contains("biases")) {
    throw ParseError("dense net needs dims, weights and biases");
  }
  DenseNet net(j.at("dims").get<std::vector<std::size_t>>());
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  if (!weights.is_array() || !biases.is_array() || weights.size() != net.layers().size() ||
      biases.size() != net.layers().size()) {
    throw ParseError("dense net layer count does not match dims");
  }
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto& layer = net.layers()[l];
    auto w = decode_vector(weights[l]);
    auto b = decode_vector(biases[l]);
    if (w.size() != layer.weights.size() || b.size() != layer.biases.size()) {
      throw ParseError("dense net layer " + std::to_string(l) + " has the wrong shape");
    }
    layer.weights = std::move(w);
    layer.biases = std::move(b);
  }
  return net;
}

MonotonicNet decode_monotonic(const Json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("weights") ||
      !j.contains("hidden_biases")) {
    throw ParseError("monotonic net needs dims, weights and hidden_biases");
  }
  const auto dims = j.at("dims").get<std::vector<std::size_t>>();
  if (dims.size() != 3 || dims[0] != 1 || dims[2] != 1) {
    throw ParseError("monotonic net dims must be [1, hidden, 1]");
  }
  MonotonicNet net(dims[1]);
  const auto& weights = j.at("weights");
  if (!weights.is_array() || weights.size() != 2) {
    throw ParseError("monotonic net weights must hold two layers");
  }
  net.hidden_weights = decode_vector(weights[0]);
  net.output_weights = decode_vector(weights[1]);
  net.hidden_biases = decode_vector(j.at("hidden_biases"));
  if (net.hidden_weights.size() != dims[1] || net.output_weights.size() != dims[1] ||
      net.hidden_biases.size() != dims[1]) {
    throw ParseError("monotonic net parameter count does not match dims");
  }
  net.check_weights();
  return net;
}

}  // namespace detail

}  // namespace fvcg
