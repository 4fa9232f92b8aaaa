#pragma once

#include <array>
#include <vector>

#include "repdyn/solver.hpp"

namespace repdyn {

// Aggregation rule as a discrete influence profile plus member risky-vote
// probabilities. Either a k-of-n threshold or an explicit 0/1 influence
// profile over the number m of other risky votes; member probabilities are
// shared or per-member (the n-1 others), per state.
struct CommitteeSpec {
    int n = 1;
    int threshold_k = 0;               // >= 1 selects the k-of-n rule
    std::vector<int> influence;        // else: influence[m], m = 0..n-1
    double lambda = 0.5;               // good-state prior
    bool shared = true;
    std::array<double, 2> shared_rho = {0.0, 0.0};          // [omega=0, omega=1]
    std::array<std::vector<double>, 2> member_rho;          // per other member

    bool uses_threshold() const { return threshold_k >= 1; }
    void validate() const;
};

// Pivot probability for the k-of-n rule under shared member probabilities:
// the mixture over states of b_{n-1,k-1}(rho_omega).
double pivot_k_of_n(const CommitteeSpec& spec);

// Pmf of the number of successes among independent non-identical Bernoullis,
// by the convolution recursion; supports up to 64 trials.
std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs);

// Pivotality for a general monotone rule, combining the influence profile
// with the Poisson-binomial count of other risky votes per state. For
// n-1 <= 20 the exhaustive vote-vector enumeration is run alongside and a
// disagreement beyond 1e-12 throws.
double pivot_general(const CommitteeSpec& spec);

// Risky-minus-safe margin with the outcome option value scaled by the pivot
// probability: phi + delta( zeta [q V(pi+) + (1-q)V(pi-) - V(pi)]
//                           - [V(pi) - V(pi_rec0)] ).
double committee_advantage(double s, double pi, const ValueFunction& v,
                           const ModelParams& p, double zeta);

CutoffResult committee_cutoff(double pi, const ValueFunction& v, const ModelParams& p,
                              double zeta, const SolveSettings& st);

struct PivotMonotonicityRow {
    int k;
    double zeta_k;
    double zeta_k1;
    bool condition_applies;  // rho_omega <= k/n for both states
    bool decreasing;         // zeta_{k+1} <= zeta_k (meaningful when applicable)
};

// Checks zeta_{k+1} <= zeta_k over k in [k_from, k_to-1] wherever the
// sufficient condition holds.
std::vector<PivotMonotonicityRow> pivot_monotonicity(const CommitteeSpec& spec, int k_from,
                                                     int k_to);

}  // namespace repdyn
