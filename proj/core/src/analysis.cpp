#include "fvcg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fvcg/acceptance_solver.hpp"
#include "fvcg/errors.hpp"
#include "fvcg/vcg.hpp"

namespace fvcg {

namespace {

constexpr std::size_t kMaxExamples = 5;

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  out.back() = hi;
  return out;
}

Instance draw_instance(const EconomicSpec& spec, std::size_t n, Rng& rng) {
  std::vector<double> q(n);
  std::vector<double> gamma(n);
  for (double& v : q) v = rng.uniform(spec.prior_q.lo, spec.prior_q.hi);
  for (double& v : gamma) v = rng.uniform(spec.prior_gamma.lo, spec.prior_gamma.hi);
  return Instance(std::move(q), std::move(gamma));
}

std::size_t draw_owner(std::size_t n, Rng& rng) {
  return std::min(n - 1, static_cast<std::size_t>(rng.unit() * static_cast<double>(n)));
}

// tau_i alone: S* - S^{-i*} + c_i, with the owner's cost at `true_gamma`.
// Returns {tau_i, accepted quality of i}.
struct OwnerOutcome {
  double tau = 0.0;
  double accepted = 0.0;
};

OwnerOutcome owner_outcome(const EconomicSpec& spec, const Instance& reported, std::size_t i,
                           double surplus_minus) {
  const auto star = solve_optimal(spec, reported);
  const double x = reported.q[i] * star.eta_star.eta[i];
  return {star.surplus_star - surplus_minus + cost(spec, x, reported.gamma[i]), x};
}

void note(SuiteReport& r, double excess, const std::string& what) {
  ++r.violations;
  r.worst = std::max(r.worst, excess);
  if (r.examples.size() < kMaxExamples) r.examples.push_back(what);
}

std::string describe(const Instance& inst, std::size_t i) {
  std::ostringstream s;
  s.precision(17);
  s << "owner " << i << " of n=" << inst.size() << " (q=" << inst.q[i] << ", gamma=" << inst.gamma[i]
    << ")";
  return s.str();
}

std::string counts(const SuiteReport& r) {
  return std::to_string(r.violations) + " violations in " + std::to_string(r.checked) + " checks";
}

ScenarioResult build_result(const EconomicSpec& spec, const TrainingConfig& weights,
                            const Scenario& scenario, std::span<const double> adj) {
  const Instance inst = scenario.instance();
  PrecomputedSample sample{inst, vcg_payment_vector(spec, inst)};
  ScenarioResult out;
  out.scenario = scenario.name;
  out.losses = sample_loss(spec, weights, sample, adj);
  const auto breakdown = assemble_payments(sample.vcg, adj);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    out.rows.push_back({i, inst.q[i], inst.gamma[i], breakdown.total[i],
                        sample.vcg.eta_star.eta[i], breakdown.tau[i], breakdown.adjustment[i]});
  }
  return out;
}

}  // namespace

ScenarioResult solve_scenario(const EconomicSpec& spec, const TrainingConfig& weights,
                              const Scenario& scenario) {
  const std::vector<double> zero(scenario.q.size(), 0.0);
  return build_result(spec, weights, scenario, zero);
}

ScenarioResult evaluate_scenario(const EconomicSpec& spec, const TrainingConfig& weights,
                                 const AdjustmentModel& model, const Scenario& scenario) {
  if (scenario.q.size() != model.n) {
    throw ConfigError("scenario '" + scenario.name + "' has " + std::to_string(scenario.q.size()) +
                      " owners but the model was trained for " + std::to_string(model.n));
  }
  const auto adj = adjustments(spec, model, scenario.instance());
  return build_result(spec, weights, scenario, adj);
}

std::vector<Scenario> equal_quality_scenarios() {
  std::vector<double> gamma;
  for (int k = 1; k <= 10; ++k) gamma.push_back(k / 10.0);
  std::vector<Scenario> out;
  for (int q = 1; q <= 4; ++q) {
    out.push_back({"equal_q_" + std::to_string(q), std::vector<double>(10, q), gamma});
  }
  return out;
}

std::vector<Scenario> equal_cost_type_scenarios() {
  std::vector<double> q;
  for (int k = 1; k <= 10; ++k) q.push_back(k / 2.0);
  std::vector<Scenario> out;
  for (int g = 2; g <= 8; g += 2) {
    out.push_back({"equal_gamma_0." + std::to_string(g), q, std::vector<double>(10, g / 10.0)});
  }
  return out;
}

CsvTable scenario_table(std::span<const ScenarioResult> results) {
  CsvTable t;
  t.header = {"scenario", "owner", "q",          "gamma", "p",     "eta",
              "tau",      "adjustment", "loss1", "loss2", "loss3", "loss"};
  for (const auto& r : results) {
    for (const auto& row : r.rows) {
      t.add_row({r.scenario, std::to_string(row.owner), format_number(row.q),
                 format_number(row.gamma), format_number(row.payment), format_number(row.eta),
                 format_number(row.tau), format_number(row.adjustment),
                 format_number(r.losses.loss1), format_number(r.losses.loss2),
                 format_number(r.losses.loss3), format_number(r.losses.total)});
    }
  }
  return t;
}

CsvTable loss_curve_table(std::span<const LossReport> curve) {
  CsvTable t;
  t.header = {"iteration", "loss1", "loss2", "loss3", "total"};
  for (std::size_t it = 0; it < curve.size(); ++it) {
    const auto& r = curve[it];
    t.add_row({std::to_string(it), format_number(r.loss1), format_number(r.loss2),
               format_number(r.loss3), format_number(r.total)});
  }
  return t;
}

CsvTable payment_surface(const EconomicSpec& spec, const AdjustmentModel& model,
                         const SurfaceOptions& options) {
  if (model.n < 1) throw ConfigError("surface needs a model with at least one owner");
  if (options.q_points < 1 || options.gamma_points < 1) {
    throw ConfigError("surface grid needs at least one point per axis");
  }
  const auto qs = linspace(spec.prior_q.lo, spec.prior_q.hi, options.q_points);
  const auto gammas = linspace(spec.prior_gamma.lo, spec.prior_gamma.hi, options.gamma_points);
  CsvTable t;
  t.header = {"q0", "gamma0", "eta0", "tau0", "adjustment0", "p0"};

  std::vector<double> q(model.n, options.others_q);
  std::vector<double> gamma(model.n, options.others_gamma);
  // Owner 0 is excluded from its own S^{-0*}, which is therefore the same
  // across the whole grid.
  const double surplus_minus =
      solve_reduced(spec, Instance(q, gamma), 0).surplus_star;
  for (double g0 : gammas) {
    for (double q0 : qs) {
      q[0] = q0;
      gamma[0] = g0;
      const Instance inst(q, gamma);
      const auto star = solve_optimal(spec, inst);
      const double eta0 = star.eta_star.eta[0];
      const double tau0 = star.surplus_star - surplus_minus + cost(spec, q0 * eta0, g0);
      const double adj0 = adjustment(spec, model, inst, 0);
      t.add_row({format_number(q0), format_number(g0), format_number(eta0), format_number(tau0),
                 format_number(adj0), format_number(tau0 + adj0)});
    }
  }
  return t;
}

SuiteReport check_surplus_monotonicity(const EconomicSpec& spec, std::size_t n,
                                       std::size_t instances, double tolerance, Rng& rng) {
  SuiteReport r;
  r.name = "surplus monotonicity";
  for (std::size_t s = 0; s < instances; ++s) {
    const Instance inst = draw_instance(spec, n, rng);
    const double base = solve_optimal(spec, inst).surplus_star;
    const std::size_t i = draw_owner(n, rng);

    Instance up_q = inst;
    up_q.q[i] = rng.uniform(inst.q[i], spec.prior_q.hi);
    const double s_q = solve_optimal(spec, up_q).surplus_star;
    ++r.checked;
    if (s_q < base - tolerance) {
      note(r, base - s_q, describe(inst, i) + ": raising q to " + format_number(up_q.q[i]) +
                              " lowered S* by " + format_number(base - s_q));
    }

    Instance up_g = inst;
    up_g.gamma[i] = rng.uniform(inst.gamma[i], spec.prior_gamma.hi);
    const double s_g = solve_optimal(spec, up_g).surplus_star;
    ++r.checked;
    if (s_g > base + tolerance) {
      note(r, s_g - base, describe(inst, i) + ": raising gamma to " +
                              format_number(up_g.gamma[i]) + " raised S* by " +
                              format_number(s_g - base));
    }
  }
  r.summary = counts(r);
  return r;
}

SuiteReport check_surplus_dominance(const EconomicSpec& spec, std::size_t n,
                                    std::size_t instances, double tolerance, Rng& rng) {
  SuiteReport r;
  r.name = "surplus dominance";
  for (std::size_t s = 0; s < instances; ++s) {
    const Instance inst = draw_instance(spec, n, rng);
    const auto vcg = vcg_payment_vector(spec, inst);
    for (std::size_t i = 0; i < n; ++i) {
      ++r.checked;
      const double excess = vcg.surplus_minus[i] - vcg.surplus_star;
      if (excess > tolerance) {
        note(r, excess, describe(inst, i) + ": S^{-i*} exceeds S* by " + format_number(excess));
      }
    }
  }
  r.summary = counts(r);
  return r;
}

SuiteReport check_cost_truthfulness(const EconomicSpec& spec, std::size_t n,
                                    std::size_t instances, std::size_t deviations,
                                    double tolerance, Rng& rng, const AdjustmentModel* model) {
  SuiteReport r;
  r.name = "truthful cost reporting";
  for (std::size_t s = 0; s < instances; ++s) {
    const Instance inst = draw_instance(spec, n, rng);
    const std::size_t i = draw_owner(n, rng);
    const double surplus_minus = solve_reduced(spec, inst, i).surplus_star;
    const double adj = model ? adjustment(spec, *model, inst, i) : 0.0;
    const double true_gamma = inst.gamma[i];

    const auto truthful = owner_outcome(spec, inst, i, surplus_minus);
    const double u_true = truthful.tau + adj - cost(spec, truthful.accepted, true_gamma);
    for (std::size_t d = 0; d < deviations; ++d) {
      Instance lie = inst;
      lie.gamma[i] = rng.uniform(spec.prior_gamma.lo, spec.prior_gamma.hi);
      const auto o = owner_outcome(spec, lie, i, surplus_minus);
      const double u_lie = o.tau + adj - cost(spec, o.accepted, true_gamma);
      ++r.checked;
      if (u_lie > u_true + tolerance) {
        note(r, u_lie - u_true, describe(inst, i) + ": reporting gamma=" +
                                    format_number(lie.gamma[i]) + " gains " +
                                    format_number(u_lie - u_true));
      }
    }
  }
  r.summary = counts(r);
  return r;
}

SuiteReport check_quality_truthfulness(const EconomicSpec& spec, std::size_t n,
                                       std::size_t instances, std::size_t deviations,
                                       double tolerance, Rng& rng, const AdjustmentModel* model) {
  SuiteReport r;
  r.name = "truthful quality reporting";
  MonotonicNet random_g;
  if (!model) random_g = init_monotonic(50, rng);
  const auto own_term = [&](const Instance& reported, std::size_t i) {
    if (model) return adjustment(spec, *model, reported, i);
    return forward_monotonic(random_g, normalize_quality(spec, reported.q[i]));
  };

  for (std::size_t s = 0; s < instances; ++s) {
    const Instance inst = draw_instance(spec, n, rng);
    const std::size_t i = draw_owner(n, rng);
    const double surplus_minus = solve_reduced(spec, inst, i).surplus_star;
    const double true_gamma = inst.gamma[i];

    const auto truthful = owner_outcome(spec, inst, i, surplus_minus);
    const double u_true =
        truthful.tau + own_term(inst, i) - cost(spec, truthful.accepted, true_gamma);
    for (std::size_t d = 0; d < deviations; ++d) {
      Instance lie = inst;
      lie.q[i] = rng.uniform(spec.prior_q.lo, inst.q[i]);
      const auto o = owner_outcome(spec, lie, i, surplus_minus);
      const double u_lie = o.tau + own_term(lie, i) - cost(spec, o.accepted, true_gamma);
      ++r.checked;
      if (u_lie > u_true + tolerance) {
        note(r, u_lie - u_true, describe(inst, i) + ": reporting q=" + format_number(lie.q[i]) +
                                    " gains " + format_number(u_lie - u_true));
      }
    }
  }
  r.summary = counts(r);
  return r;
}

SuiteReport check_monotone_net(std::size_t points, std::size_t draws, std::size_t width, Rng& rng,
                               const AdjustmentModel* model) {
  SuiteReport r;
  r.name = "monotone network";
  const auto grid = linspace(-0.5, 1.5, std::max<std::size_t>(points, 2));
  const auto scan = [&](const MonotonicNet& net, const std::string& label) {
    double prev = forward_monotonic(net, grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double cur = forward_monotonic(net, grid[k]);
      ++r.checked;
      if (cur < prev) {
        note(r, prev - cur, label + ": drops by " + format_number(prev - cur) + " at x=" +
                                format_number(grid[k]));
      }
      prev = cur;
    }
  };
  for (std::size_t d = 0; d < draws; ++d) {
    MonotonicNet net = init_monotonic(width, rng);
    // Spread the draws well beyond the initial scale, including steep units.
    const double scale = rng.uniform(0.0, 20.0);
    for (double& w : net.hidden_weights) w *= scale;
    for (double& b : net.hidden_biases) b *= scale;
    scan(net, "draw " + std::to_string(d));
  }
  if (model) scan(model->g_net, "trained g");
  r.summary = counts(r);
  return r;
}

SuiteReport check_feasibility(const EconomicSpec& spec, std::size_t n, std::size_t instances,
                              Rng& rng) {
  SuiteReport r;
  r.name = "IR+WBB existence condition";
  r.asserted = false;
  std::size_t holds = 0;
  for (std::size_t s = 0; s < instances; ++s) {
    const auto f = feasibility_condition(spec, draw_instance(spec, n, rng));
    ++r.checked;
    if (f.holds) ++holds;
  }
  r.worst = r.checked ? static_cast<double>(holds) / static_cast<double>(r.checked) : 0.0;
  r.summary = "holds on " + std::to_string(holds) + " of " + std::to_string(r.checked) +
              " samples (fraction " + format_number(r.worst) + ")";
  return r;
}

SuiteReport check_shrinking_priors(const EconomicSpec& spec, std::size_t n,
                                   std::span<const double> factors, std::size_t instances,
                                   Rng& rng) {
  SuiteReport r;
  r.name = "shrinking priors";
  if (factors.empty() || instances == 0) {
    r.summary = "nothing to check";
    return r;
  }
  // Common draws in [-1, 1], rescaled per factor.
  std::vector<std::vector<double>> uq(instances, std::vector<double>(n));
  std::vector<std::vector<double>> ug(instances, std::vector<double>(n));
  for (std::size_t s = 0; s < instances; ++s) {
    for (double& v : uq[s]) v = rng.uniform(-1.0, 1.0);
    for (double& v : ug[s]) v = rng.uniform(-1.0, 1.0);
  }
  const double cq = 0.5 * (spec.prior_q.lo + spec.prior_q.hi);
  const double cg = 0.5 * (spec.prior_gamma.lo + spec.prior_gamma.hi);
  const double hq = 0.5 * spec.prior_q.width();
  const double hg = 0.5 * spec.prior_gamma.width();

  std::vector<double> means;
  std::ostringstream summary;
  summary << "mean lhs by factor:";
  for (double f : factors) {
    EconomicSpec shrunk = spec;
    shrunk.prior_q = {cq - f * hq, cq + f * hq};
    shrunk.prior_gamma = {cg - f * hg, cg + f * hg};
    double total = 0.0;
    for (std::size_t s = 0; s < instances; ++s) {
      std::vector<double> q(n);
      std::vector<double> gamma(n);
      for (std::size_t k = 0; k < n; ++k) {
        q[k] = std::max(0.0, cq + f * hq * uq[s][k]);
        gamma[k] = std::max(0.0, cg + f * hg * ug[s][k]);
      }
      total += feasibility_condition(shrunk, Instance(std::move(q), std::move(gamma))).lhs;
    }
    means.push_back(total / static_cast<double>(instances));
    summary << " " << format_number(f) << "->" << format_number(means.back());
  }
  for (std::size_t k = 1; k < means.size(); ++k) {
    ++r.checked;
    if (means[k] > means[k - 1]) {
      note(r, means[k] - means[k - 1],
           "mean lhs rose from " + format_number(means[k - 1]) + " to " +
               format_number(means[k]) + " at factor " + format_number(factors[k]));
    }
  }
  ++r.checked;
  if (means.size() > 1 && !(std::abs(means.back()) <= 0.01 * std::abs(means.front()))) {
    note(r, std::abs(means.back()),
         "mean lhs at the narrowest prior is " + format_number(means.back()) +
             ", not below 1% of " + format_number(means.front()));
  }
  r.summary = counts(r) + "; " + summary.str();
  return r;
}

std::vector<SuiteReport> run_check_suites(const RunConfig& config, const AdjustmentModel* model) {
  config.validate();
  const EconomicSpec spec = config.economy();
  const auto& c = config.check;
  const std::size_t n = config.n;
  if (model && model->n != n) {
    throw ConfigError("model was trained for n=" + std::to_string(model->n) +
                      " but the config has n=" + std::to_string(n));
  }
  // Each suite gets its own stream so that changing one suite's counts
  // leaves the others' samples unchanged.
  Rng seeder(c.seed);
  std::vector<SuiteReport> out;
  Rng r1(seeder.next());
  out.push_back(check_surplus_monotonicity(spec, n, c.monotonicity_instances,
                                           c.surplus_tolerance, r1));
  Rng r2(seeder.next());
  out.push_back(check_surplus_dominance(spec, n, c.dominance_instances, c.surplus_tolerance, r2));
  Rng r3(seeder.next());
  out.push_back(check_cost_truthfulness(spec, n, c.dic_instances, c.dic_deviations,
                                        c.dic_tolerance, r3, model));
  Rng r4(seeder.next());
  out.push_back(check_quality_truthfulness(spec, n, c.dic_instances, c.dic_deviations,
                                           c.dic_tolerance, r4, model));
  Rng r5(seeder.next());
  out.push_back(check_monotone_net(c.monotone_net_points, c.monotone_net_draws,
                                   config.training.g_hidden, r5, model));
  Rng r6(seeder.next());
  out.push_back(check_feasibility(spec, n, c.feasibility_instances, r6));
  Rng r7(seeder.next());
  out.push_back(check_shrinking_priors(spec, n, c.shrink_factors, c.feasibility_instances, r7));
  return out;
}

}  // namespace fvcg
