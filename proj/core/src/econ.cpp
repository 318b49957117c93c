#include "fvcg/econ.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fvcg/errors.hpp"

namespace fvcg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_non_negative(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " is not finite");
  if (v < 0.0) throw DomainError(std::string(what) + " is negative: " + std::to_string(v));
}

}  // namespace

Instance::Instance(std::vector<double> q_in, std::vector<double> gamma_in)
    : q(std::move(q_in)), gamma(std::move(gamma_in)) {
  if (q.size() != gamma.size()) {
    throw DimensionError("instance: len(q)=" + std::to_string(q.size()) +
                         " but len(gamma)=" + std::to_string(gamma.size()));
  }
  for (double v : q) check_non_negative(v, "quality");
  for (double v : gamma) check_non_negative(v, "cost type");
}

Instance Instance::without(std::size_t i) const {
  if (i >= size()) {
    throw DimensionError("owner index " + std::to_string(i) + " out of range for n=" +
                         std::to_string(size()));
  }
  Instance out;
  out.q.reserve(size() - 1);
  out.gamma.reserve(size() - 1);
  for (std::size_t k = 0; k < size(); ++k) {
    if (k == i) continue;
    out.q.push_back(q[k]);
    out.gamma.push_back(gamma[k]);
  }
  return out;
}

AcceptanceVector::AcceptanceVector(std::vector<double> e) : eta(std::move(e)) {
  for (double v : eta) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("acceptance entry outside [0,1]: " + std::to_string(v));
    }
  }
}

EconomicSpec EconomicSpec::sqrt_sum(double alpha, UniformRange prior_q, UniformRange prior_gamma) {
  EconomicSpec spec;
  spec.revenue = SqrtSumRevenue{alpha};
  spec.prior_q = prior_q;
  spec.prior_gamma = prior_gamma;
  spec.validate();
  return spec;
}

EconomicSpec EconomicSpec::reference_economy(std::size_t n) {
  return sqrt_sum(std::sqrt(static_cast<double>(n)), {0.0, 5.0}, {0.0, 1.0});
}

double EconomicSpec::alpha() const {
  if (const auto* r = std::get_if<SqrtSumRevenue>(&revenue)) return r->alpha;
  throw UnsupportedEconomyError("revenue is not of the sqrt-sum kind");
}

bool EconomicSpec::is_closed_form() const {
  return std::holds_alternative<SqrtSumRevenue>(revenue) && std::holds_alternative<LinearCost>(cost);
}

void EconomicSpec::validate() const {
  if (const auto* r = std::get_if<SqrtSumRevenue>(&revenue)) {
    if (!(r->alpha > 0.0) || !std::isfinite(r->alpha)) {
      throw ConfigError("alpha must be positive and finite");
    }
  }
  for (const auto* range : {&prior_q, &prior_gamma}) {
    if (!std::isfinite(range->lo) || !std::isfinite(range->hi) || range->lo < 0.0 ||
        range->hi < range->lo) {
      throw ConfigError("prior range must satisfy 0 <= lo <= hi");
    }
  }
}

double revenue(const EconomicSpec& spec, std::span<const double> accepted_quality) {
  for (double v : accepted_quality) check_non_negative(v, "accepted quality");
  return std::visit(
      Overloaded{
          [&](const SqrtSumRevenue& r) {
            const double total =
                std::accumulate(accepted_quality.begin(), accepted_quality.end(), 0.0);
            return r.alpha * std::sqrt(total);
          },
          [&](const CustomRevenue& r) { return r.value(accepted_quality); },
      },
      spec.revenue);
}

double cost(const EconomicSpec& spec, double accepted_quality_i, double gamma_i) {
  check_non_negative(accepted_quality_i, "accepted quality");
  check_non_negative(gamma_i, "cost type");
  return std::visit(Overloaded{
                        [&](const LinearCost&) { return gamma_i * accepted_quality_i; },
                        [&](const CustomCost& c) { return c.value(accepted_quality_i, gamma_i); },
                    },
                    spec.cost);
}

double marginal_cost(const EconomicSpec& spec, double accepted_quality_i, double gamma_i) {
  return std::visit(
      Overloaded{
          [&](const LinearCost&) { return gamma_i; },
          [&](const CustomCost& c) { return c.derivative(accepted_quality_i, gamma_i); },
      },
      spec.cost);
}

std::vector<double> accepted_quality(const Instance& inst, std::span<const double> eta) {
  if (eta.size() != inst.size()) {
    throw DimensionError("acceptance vector length " + std::to_string(eta.size()) +
                         " does not match n=" + std::to_string(inst.size()));
  }
  std::vector<double> out(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) out[i] = inst.q[i] * eta[i];
  return out;
}

double social_surplus(const EconomicSpec& spec, const Instance& inst,
                      std::span<const double> eta) {
  const auto accepted = accepted_quality(inst, eta);
  double total_cost = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) total_cost += cost(spec, accepted[i], inst.gamma[i]);
  return revenue(spec, accepted) - total_cost;
}

namespace {

std::vector<double> unit_price_ratios(std::span<const double> payments, const Instance& inst) {
  if (payments.size() != inst.size()) {
    throw DimensionError("payment vector length " + std::to_string(payments.size()) +
                         " does not match n=" + std::to_string(inst.size()));
  }
  std::vector<double> ratios(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double denom = inst.q[i] + payments[i];
    if (denom == 0.0) {
      throw DegenerateRatioError("q_i + p_i = 0 for owner " + std::to_string(i));
    }
    ratios[i] = inst.q[i] / denom;
  }
  return ratios;
}

}  // namespace

double unfairness(const EconomicSpec& spec, std::span<const double> payments,
                  const Instance& inst) {
  return std::visit(
      Overloaded{
          [&](const UnitPriceVariance&) {
            const auto r = unit_price_ratios(payments, inst);
            if (r.empty()) return 0.0;
            if (std::all_of(r.begin(), r.end(), [&](double v) { return v == r.front(); })) {
              return 0.0;
            }
            const double n = static_cast<double>(r.size());
            const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
            double var = 0.0;
            for (double v : r) var += (v - mean) * (v - mean);
            return var / n;
          },
          [&](const CustomUnfairness& u) { return u.value(payments, inst); },
      },
      spec.unfairness);
}

std::vector<double> unfairness_gradient(const EconomicSpec& spec,
                                        std::span<const double> payments, const Instance& inst) {
  return std::visit(
      Overloaded{
          [&](const UnitPriceVariance&) {
            const auto r = unit_price_ratios(payments, inst);
            std::vector<double> grad(r.size(), 0.0);
            if (r.empty()) return grad;
            const double n = static_cast<double>(r.size());
            const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
            for (std::size_t i = 0; i < r.size(); ++i) {
              const double denom = inst.q[i] + payments[i];
              const double dr_dp = -inst.q[i] / (denom * denom);
              grad[i] = 2.0 / n * (r[i] - mean) * dr_dp;
            }
            return grad;
          },
          [&](const CustomUnfairness& u) {
            if (!u.gradient) throw UnsupportedEconomyError("custom unfairness has no gradient");
            return u.gradient(payments, inst);
          },
      },
      spec.unfairness);
}

double utility(double payment_i, double accepted_quality_i, double gamma_i) {
  check_non_negative(accepted_quality_i, "accepted quality");
  check_non_negative(gamma_i, "cost type");
  return payment_i - gamma_i * accepted_quality_i;
}

double utility(const EconomicSpec& spec, double payment_i, double accepted_quality_i,
               double gamma_i) {
  return payment_i - cost(spec, accepted_quality_i, gamma_i);
}

}  // namespace fvcg
