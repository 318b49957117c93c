#include "fvcg/acceptance_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "fvcg/errors.hpp"

namespace fvcg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// alpha / (2 sqrt(total)); +inf for the empty prefix.
double marginal_revenue(double alpha, double total) {
  return total > 0.0 ? alpha / (2.0 * std::sqrt(total)) : kInf;
}

// Revenue gradient w.r.t. accepted quality. For sqrt-sum at zero total the
// marginal revenue is +inf.
std::vector<double> revenue_gradient(const EconomicSpec& spec, std::span<const double> accepted) {
  if (const auto* r = std::get_if<SqrtSumRevenue>(&spec.revenue)) {
    const double total = std::accumulate(accepted.begin(), accepted.end(), 0.0);
    return std::vector<double>(accepted.size(), marginal_revenue(r->alpha, total));
  }
  const auto& custom = std::get<CustomRevenue>(spec.revenue);
  if (!custom.gradient) throw UnsupportedEconomyError("custom revenue has no gradient hook");
  return custom.gradient(accepted);
}

std::size_t grid_points_per_axis(double resolution) {
  return static_cast<std::size_t>(std::floor(1.0 / resolution + 1e-9)) + 1;
}

// Axis values {lo, lo+h, ...} clipped to [0,1], with the upper end included.
std::vector<double> axis_values(double lo, double hi, double h) {
  lo = std::max(0.0, lo);
  hi = std::min(1.0, hi);
  std::vector<double> v;
  const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / h + 1e-9));
  v.reserve(steps + 2);
  for (std::size_t k = 0; k <= steps; ++k) v.push_back(lo + static_cast<double>(k) * h);
  if (hi - v.back() > 1e-12) v.push_back(hi);
  v.back() = std::min(v.back(), 1.0);
  return v;
}

// Exhaustive odometer search over the product of per-owner axes.
SolveResult search_product(const EconomicSpec& spec, const Instance& inst,
                           const std::vector<std::vector<double>>& axes) {
  const std::size_t n = inst.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> eta(n);
  for (std::size_t i = 0; i < n; ++i) eta[i] = axes[i][0];

  SolveResult best;
  best.surplus_star = -kInf;
  std::vector<double> best_eta = eta;
  while (true) {
    const double s = social_surplus(spec, inst, eta);
    if (s > best.surplus_star) {
      best.surplus_star = s;
      best_eta = eta;
    }
    std::size_t d = 0;
    for (; d < n; ++d) {
      if (++idx[d] < axes[d].size()) {
        eta[d] = axes[d][idx[d]];
        break;
      }
      idx[d] = 0;
      eta[d] = axes[d][0];
    }
    if (d == n) break;
  }
  best.eta_star = AcceptanceVector(std::move(best_eta));
  return best;
}

}  // namespace

SolveResult solve_closed_form(const EconomicSpec& spec, const Instance& inst) {
  if (!spec.is_closed_form()) {
    throw UnsupportedEconomyError("closed form needs sqrt-sum revenue and linear cost");
  }
  const double alpha = spec.alpha();
  const std::size_t n = inst.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return inst.gamma[a] < inst.gamma[b]; });

  std::vector<double> eta(n, 0.0);
  double cum_prev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t owner = order[j];
    const double q = inst.q[owner];
    const double g = inst.gamma[owner];
    const double cum = cum_prev + q;
    if (marginal_revenue(alpha, cum) >= g) {
      eta[owner] = 1.0;
    } else if (j != 0 && marginal_revenue(alpha, cum_prev) <= g) {
      eta[owner] = 0.0;
    } else if (q == 0.0) {
      eta[owner] = 0.0;
    } else {
      const double target = (alpha / (2.0 * g)) * (alpha / (2.0 * g));
      eta[owner] = std::clamp((target - cum_prev) / q, 0.0, 1.0);
    }
    cum_prev = cum;
  }

  SolveResult out;
  out.surplus_star = social_surplus(spec, inst, eta);
  out.eta_star = AcceptanceVector(std::move(eta));
  return out;
}

SolveResult solve_optimal(const EconomicSpec& spec, const Instance& inst) {
  if (spec.is_closed_form()) return solve_closed_form(spec, inst);
  return solve_numeric(spec, inst);
}

SolveResult solve_reduced(const EconomicSpec& spec, const Instance& inst, std::size_t excluded) {
  return solve_optimal(spec, inst.without(excluded));
}

SolveResult solve_numeric(const EconomicSpec& spec, const Instance& inst,
                          NumericSolveOptions options) {
  if (!(options.step > 0.0)) throw DomainError("numeric solver step must be positive");
  const std::size_t n = inst.size();
  std::vector<double> eta(n, 1.0);
  double current = social_surplus(spec, inst, eta);
  double step = options.step;
  std::vector<double> trial(n);
  std::vector<double> gradient(n);

  for (std::size_t it = 0; it < options.iterations; ++it) {
    const auto accepted = accepted_quality(inst, eta);
    const auto dB = revenue_gradient(spec, accepted);
    bool unbounded = false;
    for (std::size_t i = 0; i < n; ++i) {
      gradient[i] = 0.0;
      if (inst.q[i] == 0.0) continue;
      const double marginal = dB[i] - marginal_cost(spec, accepted[i], inst.gamma[i]);
      if (marginal == kInf) {
        // Revenue is infinitely steep at this point; jump to full acceptance.
        unbounded = true;
        eta[i] = 1.0;
        continue;
      }
      if (!std::isfinite(marginal)) {
        throw NumericalError("non-finite surplus gradient at iteration " + std::to_string(it));
      }
      gradient[i] = marginal;
    }
    if (unbounded) {
      current = social_surplus(spec, inst, eta);
      continue;
    }

    // Backtracking: grow the step after an improving move, halve it after a
    // failed one. Steps are taken in accepted quality x_i = q_i eta_i, so
    // owners with tiny q still move at a useful rate.
    bool moved = false;
    while (step > options.min_step) {
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = inst.q[i] == 0.0
                       ? eta[i]
                       : std::clamp(eta[i] + step * gradient[i] / inst.q[i], 0.0, 1.0);
      }
      const double s = social_surplus(spec, inst, trial);
      if (!std::isfinite(s)) {
        throw NumericalError("non-finite surplus at iteration " + std::to_string(it));
      }
      if (s > current) {
        eta.swap(trial);
        current = s;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return SolveResult{AcceptanceVector(std::move(eta)), current};
}

SolveResult oracle_grid(const EconomicSpec& spec, const Instance& inst, double resolution,
                        std::size_t max_points) {
  if (!(resolution > 0.0 && resolution <= 1.0)) {
    throw DomainError("grid resolution must lie in (0, 1]");
  }
  const std::size_t n = inst.size();
  if (n > 4) throw RefusalError("grid oracle refuses n=" + std::to_string(n) + " (limit 4)");
  if (n == 0) return SolveResult{AcceptanceVector{}, social_surplus(spec, inst, {})};

  const auto axis = axis_values(0.0, 1.0, resolution);
  const double total = std::pow(static_cast<double>(axis.size()), static_cast<double>(n));
  if (total > static_cast<double>(max_points)) {
    throw RefusalError("grid of " + std::to_string(total) + " points exceeds budget");
  }
  return search_product(spec, inst, std::vector<std::vector<double>>(n, axis));
}

SolveResult oracle_grid_refined(const EconomicSpec& spec, const Instance& inst, double coarse,
                                double fine) {
  constexpr double kExhaustiveBudget = 2.0e6;
  const std::size_t n = inst.size();
  if (n == 0) return oracle_grid(spec, inst, coarse);

  // Start coarser when the exhaustive pass at `coarse` is unaffordable; the
  // zoom rounds pass through `coarse` on the way down.
  double h = coarse;
  while (std::pow(static_cast<double>(grid_points_per_axis(h)), static_cast<double>(n)) >
             kExhaustiveBudget &&
         h < 1.0) {
    h = std::min(1.0, h * 10.0);
  }
  SolveResult best = oracle_grid(spec, inst, h);

  while (h > fine * (1.0 + 1e-9)) {
    const double next = std::max(fine, h / 10.0);
    std::vector<std::vector<double>> axes(n);
    for (std::size_t i = 0; i < n; ++i) {
      axes[i] = axis_values(best.eta_star[i] - 2.0 * h, best.eta_star[i] + 2.0 * h, next);
    }
    SolveResult candidate = search_product(spec, inst, axes);
    if (candidate.surplus_star > best.surplus_star) best = std::move(candidate);
    h = next;
  }
  return best;
}

}  // namespace fvcg
