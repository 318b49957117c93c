#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fvcg/econ.hpp"
#include "fvcg/trainer.hpp"

namespace fvcg {

// Explicit report vectors for one economy.
struct Scenario {
  std::string name;
  std::vector<double> q;
  std::vector<double> gamma;

  Instance instance() const { return Instance(q, gamma); }
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Sample counts and tolerances for the property suites.
struct CheckConfig {
  std::uint64_t seed = 7;
  std::size_t monotonicity_instances = 1000;
  std::size_t dominance_instances = 1000;
  std::size_t dic_instances = 500;
  std::size_t dic_deviations = 10;
  double dic_tolerance = 1e-8;
  double surplus_tolerance = 1e-9;
  std::size_t monotone_net_points = 1000;
  std::size_t monotone_net_draws = 20;
  std::size_t feasibility_instances = 1000;
  // Prior half-widths, as fractions of the configured ones, for the
  // shrinking-prior sweep. Must be strictly decreasing.
  std::vector<double> shrink_factors{1.0, 0.5, 0.1, 0.01, 0.001};

  void validate() const;
  friend bool operator==(const CheckConfig&, const CheckConfig&) = default;
};

struct RunConfig {
  std::size_t n = 10;
  double alpha = 0.0;  // 0 selects sqrt(n)
  UniformRange prior_q{0.0, 5.0};
  UniformRange prior_gamma{0.0, 1.0};
  TrainingConfig training;
  std::vector<Scenario> scenarios;
  CheckConfig check;

  // sqrt-sum revenue, linear cost, unit-price-variance unfairness.
  EconomicSpec economy() const;
  double effective_alpha() const;
  void validate() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

// The reference setup: n = 10, alpha = sqrt(10), q ~ U[0,5], gamma ~ U[0,1],
// default training parameters and no scenarios.
RunConfig default_run_config();

// JSON layout:
//   {"economy":  {"n", "alpha", "prior_q": [lo, hi], "prior_gamma": [lo, hi]},
//    "training": {"lambda1", "lambda2", "lambda3", "T", "a", "b", "iterations",
//                 "seed", "h_hidden": [...], "g_hidden",
//                 "zero_h_output", "g_bias_offset"},
//    "scenarios": [{"name", "q": [...], "gamma": [...]}],
//    "check":    {"seed", "monotonicity_instances", ...}}
// Every section and key is optional (defaults as above); unknown keys are
// rejected with ConfigError.
RunConfig parse_run_config(const std::string& text);
std::string serialize_run_config(const RunConfig& config);

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace fvcg
