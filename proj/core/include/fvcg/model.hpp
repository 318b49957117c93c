#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "fvcg/econ.hpp"
#include "fvcg/neuralnet.hpp"

namespace fvcg {

// Trained adjustment rule: h (others' reports) + g (own quality), shared by
// every owner of an n-owner economy.
struct AdjustmentModel {
  std::string spec_hash;
  std::size_t n = 0;
  DenseNet h_net;
  MonotonicNet g_net;

  friend bool operator==(const AdjustmentModel&, const AdjustmentModel&) = default;
};

// Stable fingerprint of the economy (kinds, alpha, priors) and n. Custom
// hooks hash by kind only.
std::string spec_hash(const EconomicSpec& spec, std::size_t n);

// {spec_hash, n, h_net:{dims, weights, biases}, g_net:{dims, weights, hidden_biases}}
std::string serialize_model(const AdjustmentModel& model);
AdjustmentModel deserialize_model(const std::string& text);

void save_model(const AdjustmentModel& model, const std::filesystem::path& path);
AdjustmentModel load_model(const std::filesystem::path& path);

}  // namespace fvcg
