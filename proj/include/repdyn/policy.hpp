#pragma once

#include <stdexcept>
#include <vector>

#include "repdyn/solver.hpp"

namespace repdyn {

// Affine success/failure transfers: beta1 paid on (a=1, y=1), beta0 charged on
// (a=1, y=0). Limited liability: both nonnegative.
struct BonusContract {
    double beta1 = 0.0;
    double beta0 = 0.0;
    void validate() const;
};

// How the transfer enters the margin: weighted by the cutoff type's success
// probability (the self-consistent calculus), or by the good-state prior
// alpha = lambda (the main-text shortcut), kept for comparison.
enum class BonusWeighting { SuccessProbability, StatePrior };

class IneffectiveInstrument : public std::runtime_error {
  public:
    explicit IneffectiveInstrument(const std::string& msg) : std::runtime_error(msg) {}
};

// risky_advantage plus the transfer rotation; bit-identical to the plain
// margin at (0, 0).
double bonus_advantage(double s, double pi, const ValueFunction& v, const ModelParams& p,
                       const BonusContract& contract,
                       BonusWeighting weighting = BonusWeighting::SuccessProbability);

CutoffResult bonus_cutoff(double pi, const ValueFunction& v, const ModelParams& p,
                          const BonusContract& contract, const SolveSettings& st,
                          BonusWeighting weighting = BonusWeighting::SuccessProbability);

// Experimentation rate R_H at the bonus-shifted cutoff.
double rho_of_bonus(double pi, const ValueFunction& v, const ModelParams& p, double beta1,
                    const SolveSettings& st);

// d rho / d beta1 via the implicit-function formula at the bonus cutoff:
// ds*/dbeta1 = -P_S(s*) / d_s Delta, rho' = -R_H'(s*) ds*/dbeta1.
// Throws IneffectiveInstrument at clamped cutoffs.
double rho_prime(double pi, const ValueFunction& v, const ModelParams& p, double beta1,
                 const SolveSettings& st);

// Unique beta1 with rho(pi; beta1) = rho_target; requires
// rho(pi; 0) < rho_target < 1.
double calibrate_bonus(double pi, const ValueFunction& v, const ModelParams& p,
                       double rho_target, const SolveSettings& st);

struct MinimalTransfers {
    double beta1_min = 0.0;
    double beta0_min = 0.0;
    bool beta1_effective = true;  // false when P_S = 0 at the target
    bool beta0_effective = true;  // false when P_S = 1 at the target
};

// Smallest transfers implementing the target cutoff s_tilde: the success-only
// bonus offsets a negative margin, the failure-only penalty a positive one.
MinimalTransfers minimal_transfers(double pi, double s_tilde, const ValueFunction& v,
                                   const ModelParams& p);

struct PlannerInputs {
    double surplus_b = 1.0;         // planner value per success
    double eta = 0.1;               // shadow price of funds
    std::vector<double> pi_sample;  // stationary sample of beliefs
};

struct PlannerResult {
    double beta_star = 0.0;
    bool boundary_zero = false;  // local gain <= eta * success rate
    bool unbounded = false;      // eta == 0 with positive local gain
    double gain = 0.0;           // E[rho' * S_exp]
    double budget_term = 0.0;    // eta * R_succ(0)
    double curvature = 0.0;      // eta * E[rho' * P_S]
    int clamped_points = 0;      // sampled points where the bonus has no bite
};

// Newton step for the planner's local first-order condition at beta = 0 under
// the steady-state objective; S_exp uses quadratic effort cost e^2/2 with the
// public-branch effort.
PlannerResult planner_local_bonus(const PlannerInputs& inputs,
                                  const EquilibriumSolution& sol,
                                  const SolveSettings& st);

}  // namespace repdyn
