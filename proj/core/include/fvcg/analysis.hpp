#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fvcg/config.hpp"
#include "fvcg/csv.hpp"
#include "fvcg/econ.hpp"
#include "fvcg/model.hpp"
#include "fvcg/rng.hpp"
#include "fvcg/trainer.hpp"

namespace fvcg {

struct OwnerRow {
  std::size_t owner = 0;
  double q = 0.0;
  double gamma = 0.0;
  double payment = 0.0;  // tau + adjustment
  double eta = 0.0;
  double tau = 0.0;
  double adjustment = 0.0;
};

struct ScenarioResult {
  std::string scenario;
  std::vector<OwnerRow> rows;  // one per owner, in input order
  LossReport losses;
};

// Mechanism-only payments: eta*, tau, zero adjustments.
ScenarioResult solve_scenario(const EconomicSpec& spec, const TrainingConfig& weights,
                              const Scenario& scenario);

// Full payments with the trained adjustment. Throws ConfigError if the
// model was built for a different number of owners.
ScenarioResult evaluate_scenario(const EconomicSpec& spec, const TrainingConfig& weights,
                                 const AdjustmentModel& model, const Scenario& scenario);

// Reference scenarios with ten owners: equal qualities q in {1,2,3,4} with
// cost types 0.1..1.0, and equal cost types gamma in {0.2,0.4,0.6,0.8} with
// qualities 0.5..5.0.
std::vector<Scenario> equal_quality_scenarios();
std::vector<Scenario> equal_cost_type_scenarios();

// Columns: scenario, owner, q, gamma, p, eta, tau, adjustment, loss1, loss2,
// loss3, loss. Scenario losses are repeated on each owner row.
CsvTable scenario_table(std::span<const ScenarioResult> results);

// Columns: iteration, loss1, loss2, loss3, total.
CsvTable loss_curve_table(std::span<const LossReport> curve);

// Owner 0's payment over a (q0, gamma0) grid spanning the priors, every
// other owner fixed at (others_q, others_gamma).
struct SurfaceOptions {
  std::size_t q_points = 51;
  std::size_t gamma_points = 51;
  double others_q = 2.5;
  double others_gamma = 0.5;
};

// Columns: q0, gamma0, eta0, tau0, adjustment0, p0; rows ordered by gamma0
// then q0.
CsvTable payment_surface(const EconomicSpec& spec, const AdjustmentModel& model,
                         const SurfaceOptions& options = {});

// Outcome of one sampled property suite. Suites that only report a
// statistic have `asserted` false and always pass.
struct SuiteReport {
  std::string name;
  bool asserted = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst = 0.0;                 // largest violation (or statistic)
  std::vector<std::string> examples;  // a few violating cases
  std::string summary;

  bool passed() const { return !asserted || violations == 0; }
};

// S* never falls when one owner's quality rises, never rises when one
// owner's cost type rises.
SuiteReport check_surplus_monotonicity(const EconomicSpec& spec, std::size_t n,
                                       std::size_t instances, double tolerance, Rng& rng);

// S* >= S^{-i*} for every owner.
SuiteReport check_surplus_dominance(const EconomicSpec& spec, std::size_t n,
                                    std::size_t instances, double tolerance, Rng& rng);

// No cost-type misreport raises an owner's true utility. The adjustment
// (if given) is frozen at its truthful value: h ignores the owner's own
// report and g depends only on quality.
SuiteReport check_cost_truthfulness(const EconomicSpec& spec, std::size_t n,
                                    std::size_t instances, std::size_t deviations,
                                    double tolerance, Rng& rng,
                                    const AdjustmentModel* model = nullptr);

// No quality under-report raises an owner's true utility. Without a model a
// fresh random monotone g is drawn for the suite.
SuiteReport check_quality_truthfulness(const EconomicSpec& spec, std::size_t n,
                                       std::size_t instances, std::size_t deviations,
                                       double tolerance, Rng& rng,
                                       const AdjustmentModel* model = nullptr);

// Random non-negative-weight nets evaluated on an ordered grid over [-0.5,
// 1.5] must be non-decreasing (exactly). A given model's g is checked too.
SuiteReport check_monotone_net(std::size_t points, std::size_t draws, std::size_t width, Rng& rng,
                               const AdjustmentModel* model = nullptr);

// Fraction of prior samples on which the IR+WBB existence condition holds.
// Reported, not asserted.
SuiteReport check_feasibility(const EconomicSpec& spec, std::size_t n, std::size_t instances,
                              Rng& rng);

// Shrinks both priors toward their midpoints by each factor, evaluating the
// existence condition's left-hand side on the same underlying draws. The
// mean must not increase as the priors shrink and must end below 1% of the
// widest prior's mean.
SuiteReport check_shrinking_priors(const EconomicSpec& spec, std::size_t n,
                                   std::span<const double> factors, std::size_t instances,
                                   Rng& rng);

// Every suite above with counts and tolerances from `config.check`.
std::vector<SuiteReport> run_check_suites(const RunConfig& config,
                                          const AdjustmentModel* model = nullptr);

}  // namespace fvcg
