#pragma once

#include <cstddef>

#include "fvcg/econ.hpp"

namespace fvcg {

// Surplus-maximizing acceptance vector and the surplus it attains.
struct SolveResult {
  AcceptanceVector eta_star;
  double surplus_star = 0.0;
};

// Greedy solution for the sqrt-sum revenue / linear cost economy.
//
// Owners are visited by increasing cost type (stable on ties, so equal cost
// types are admitted in index order). Owner j is fully accepted while the
// marginal revenue alpha / (2 sqrt(Q_j)) at the cumulative quality Q_j that
// includes it still covers its cost type; it is rejected once the marginal
// revenue before it no longer does; otherwise it is accepted fractionally so
// that marginal revenue equals its cost type. The empty prefix has infinite
// marginal revenue, so the first visited owner is never rejected outright.
//
// Throws UnsupportedEconomyError for other economies.
SolveResult solve_closed_form(const EconomicSpec& spec, const Instance& inst);

// Closed form for sqrt-sum/linear economies, projected gradient otherwise.
SolveResult solve_optimal(const EconomicSpec& spec, const Instance& inst);

// Optimum of the instance with owner `excluded` removed (eta has n-1 entries).
SolveResult solve_reduced(const EconomicSpec& spec, const Instance& inst, std::size_t excluded);

struct NumericSolveOptions {
  double step = 0.05;       // initial step
  double min_step = 1e-14;  // stop once no step this large improves
  std::size_t iterations = 20000;
};

// Projected gradient ascent on the surplus starting from the all-ones
// vector. Steps are taken in accepted quality q_i eta_i (each projected onto
// [0, q_i]); the step doubles after every improving move and halves until a
// move improves, so the surplus never decreases. Stops when no step above
// `min_step` improves or after `iterations` moves.
SolveResult solve_numeric(const EconomicSpec& spec, const Instance& inst,
                          NumericSolveOptions options = {});

// Exhaustive search over the grid {0, r, 2r, ..., 1}^n (1 is always
// included). Refuses n > 4 or grids with more than `max_points` points.
SolveResult oracle_grid(const EconomicSpec& spec, const Instance& inst, double resolution,
                        std::size_t max_points = 50'000'000);

// Exhaustive grid at `coarse`, then repeated zooming around the incumbent
// (window of +-2 cells, 10x finer each round) down to `fine`. Relies on the
// surplus being concave in eta, which holds for concave revenue and convex
// cost.
SolveResult oracle_grid_refined(const EconomicSpec& spec, const Instance& inst, double coarse,
                                double fine);

}  // namespace fvcg
