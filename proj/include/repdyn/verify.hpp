#pragma once

#include <string>
#include <vector>

#include "repdyn/dynamics.hpp"
#include "repdyn/solver.hpp"

namespace repdyn {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Continuous-time coefficients recomputed from the normal cdf directly,
// bypassing branch_distribution; the independent leg of the dual-route check.
std::vector<CTRow> ct_coefficients_direct(const EquilibriumSolution& sol);

// Fast invariants on a solved equilibrium: Bayes consistency, branch row sums,
// posterior ordering, monotone value, conservatism, margin-zero at interior
// cutoffs, single crossing on a dense scan, drift signs, and the dual-route
// continuous-time check.
std::vector<CheckResult> verify_solution(const EquilibriumSolution& sol);

// Full suite: solves at the given parameters and runs verify_solution plus the
// fixed-policy contraction bound, the three comparative-statics sweeps, and
// module oracle agreements (Poisson-binomial vs enumeration, threshold-rule
// reduction, bonus calibration round trip, minimal-transfer indifference,
// rho-prime vs finite differences, leave-one-out canary, binary diagnosticity).
std::vector<CheckResult> verify_full(const ModelParams& p, const Grid& grid,
                                     const SolveSettings& st);

// Cross-checks a stored equilibrium table against a fresh solve: every row's
// branch quantities are recomputed at (pi, sStar) and compared. Returns one
// CheckResult per column family; the first mismatch names the row.
std::vector<CheckResult> verify_solution_file(const std::string& csv_path,
                                              const ModelParams& p, const Grid& grid,
                                              const SolveSettings& st);

bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace repdyn
