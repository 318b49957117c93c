#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace fvcg {

// Reported economy state: data quality q_i and cost type gamma_i per owner.
struct Instance {
  std::vector<double> q;
  std::vector<double> gamma;

  Instance() = default;
  // Validates lengths, finiteness and non-negativity.
  Instance(std::vector<double> q, std::vector<double> gamma);

  std::size_t size() const { return q.size(); }
  bool empty() const { return q.empty(); }

  // Instance with owner `i` deleted; order of the others is kept.
  Instance without(std::size_t i) const;
};

struct AcceptanceVector {
  std::vector<double> eta;

  AcceptanceVector() = default;
  explicit AcceptanceVector(std::vector<double> eta);

  std::size_t size() const { return eta.size(); }
  double operator[](std::size_t i) const { return eta[i]; }
};

struct UniformRange {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool degenerate() const { return hi == lo; }
};

// B(x) = alpha * sqrt(sum x).
struct SqrtSumRevenue {
  double alpha = 1.0;
};

// Revenue hook. `value` must be monotone non-decreasing in every coordinate;
// `gradient` is only needed by the numeric solver.
struct CustomRevenue {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
};

// c_i(x, gamma) = gamma * x.
struct LinearCost {};

// Cost hook: value(x, gamma) >= 0, non-decreasing in x. `derivative` is
// d value / d x, used by the numeric solver.
struct CustomCost {
  std::function<double(double, double)> value;
  std::function<double(double, double)> derivative;
};

// Population variance of q_i / (q_i + p_i).
struct UnitPriceVariance {};

// Unfairness hook. `gradient` returns d omega / d p_i and is required for
// training.
struct CustomUnfairness {
  std::function<double(std::span<const double> payments, const Instance& inst)> value;
  std::function<std::vector<double>(std::span<const double> payments, const Instance& inst)>
      gradient;
};

using RevenueModel = std::variant<SqrtSumRevenue, CustomRevenue>;
using CostModel = std::variant<LinearCost, CustomCost>;
using UnfairnessModel = std::variant<UnitPriceVariance, CustomUnfairness>;

struct EconomicSpec {
  RevenueModel revenue = SqrtSumRevenue{};
  CostModel cost = LinearCost{};
  UnfairnessModel unfairness = UnitPriceVariance{};
  UniformRange prior_q{0.0, 5.0};
  UniformRange prior_gamma{0.0, 1.0};

  // SqrtSum revenue with scale alpha, linear cost, unit-price variance.
  static EconomicSpec sqrt_sum(double alpha, UniformRange prior_q, UniformRange prior_gamma);

  // Reference economy: alpha = sqrt(n), q ~ U[0,5], gamma ~ U[0,1].
  static EconomicSpec reference_economy(std::size_t n);

  // Scale of the SqrtSum revenue; throws UnsupportedEconomyError otherwise.
  double alpha() const;

  bool is_closed_form() const;

  // Checks alpha > 0 and prior bounds.
  void validate() const;
};

double revenue(const EconomicSpec& spec, std::span<const double> accepted_quality);

double cost(const EconomicSpec& spec, double accepted_quality_i, double gamma_i);

// d cost / d accepted_quality_i.
double marginal_cost(const EconomicSpec& spec, double accepted_quality_i, double gamma_i);

// Element-wise q_i * eta_i.
std::vector<double> accepted_quality(const Instance& inst, std::span<const double> eta);

double social_surplus(const EconomicSpec& spec, const Instance& inst,
                      std::span<const double> eta);

double unfairness(const EconomicSpec& spec, std::span<const double> payments,
                  const Instance& inst);

// d unfairness / d payments.
std::vector<double> unfairness_gradient(const EconomicSpec& spec,
                                        std::span<const double> payments, const Instance& inst);

// Quasilinear utility p_i - c_i(q_i eta_i, gamma_i) under linear cost.
double utility(double payment_i, double accepted_quality_i, double gamma_i);

double utility(const EconomicSpec& spec, double payment_i, double accepted_quality_i,
               double gamma_i);

}  // namespace fvcg
