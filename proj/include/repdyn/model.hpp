#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace repdyn {

// Belief arithmetic. Posteriors are kept inside [kBeliefFloor, 1 - kBeliefFloor]
// so log-odds stay finite.
inline constexpr double kBeliefFloor = 1e-9;

// Tail probabilities below this are treated as degenerate conditioning events.
inline constexpr double kDegenerateTol = 1e-12;

double normal_cdf(double x);
double normal_pdf(double x);

double logit(double p);
double logistic(double x);
double clamp_belief(double p);

// logistic(logit(pi) + j); additive in j by construction.
double apply_log_odds(double pi, double j);

enum class FlowUtility { PiSquared };
enum class EffortCost { Quadratic };
enum class SafeUpdate { RecOnly, Freeze };
enum class LowTypeBehavior { MatchFrequency, CutoffOffset };

// Primitives of the Gaussian-quadratic benchmark.
struct ModelParams {
    double mu0 = 0.0;       // bad-state signal mean
    double mu1 = 1.0;       // good-state signal mean
    double sigma_h = 0.8;   // high-type signal std
    double sigma_l = 1.6;   // low-type signal std
    double lambda = 0.5;    // good-state prior
    double delta = 0.95;    // discount factor
    double phi = 0.0;       // per-recommendation fee
    double delta_l = 0.30;  // low-type cutoff offset (s_L = s_H + delta_l)

    FlowUtility flow_utility = FlowUtility::PiSquared;
    EffortCost effort_cost = EffortCost::Quadratic;
    SafeUpdate safe_update = SafeUpdate::RecOnly;
    LowTypeBehavior low_type = LowTypeBehavior::MatchFrequency;

    double flow(double pi) const { return pi * pi; }

    // Throws std::invalid_argument on violated invariants (sigma_h > 0,
    // sigma_l >= sigma_h, mu1 > mu0, lambda in (0,1), delta in [0,1), phi >= 0;
    // the weak inequalities admit the degenerate benchmarks used in tests).
    void validate() const;
};

// Risky-recommendation probabilities per type/state at cutoffs
// s_H and s_L = s_H + delta_l. a uses mu1, b uses mu0.
struct TailQuadruple {
    double a_h = 0.0;
    double b_h = 0.0;
    double a_l = 0.0;
    double b_l = 0.0;
    double r_h = 0.0;  // lambda*a_h + (1-lambda)*b_h
    double r_l = 0.0;
};

TailQuadruple gaussian_tails(double cutoff_h, const ModelParams& p);

enum class Observation { Safe, RiskySuccess, RiskyFailure };

struct BranchEntry {
    Observation label;
    double prob_h;     // probability under theta = H
    double prob_l;     // probability under theta = L
    double posterior;  // public type posterior after the observation
};

// The three-outcome public-observation lottery at a belief point.
struct BranchDistribution {
    std::array<BranchEntry, 3> entries;  // Safe, RiskySuccess, RiskyFailure
    double pi_rec1 = 0.0;      // type posterior after a = 1
    double pi_rec0 = 0.0;      // type posterior after a = 0
    double p_h = 0.0;          // Pr(omega=1 | a=1, H)
    double p_l = 0.0;          // Pr(omega=1 | a=1, L)
    double lambda_post = 0.0;  // public success belief after a = 1
    double effort = 0.0;       // implementer best reply, e* = lambda_post
    double success_prob = 0.0; // P_S = lambda_post * effort
    double j_plus = 0.0;       // log-likelihood jump after success
    double j_minus = 0.0;      // log-likelihood jump after failure
    double pi_plus = 0.0;      // posterior after (a=1, y=1)
    double pi_minus = 0.0;     // posterior after (a=1, y=0)
    double r_h = 0.0;          // risky recommendation frequency, H
    double r_l = 0.0;          // risky recommendation frequency, L
    bool degenerate = false;   // some conditioning event had probability < kDegenerateTol
};

// Public-observation lottery induced by the high-type cutoff at belief pi.
// Requires 0 < pi < 1.
BranchDistribution branch_distribution(double pi, double cutoff_h, const ModelParams& p);

// Same, from precomputed tails (the tails do not depend on pi).
BranchDistribution branch_distribution(double pi, const TailQuadruple& tails,
                                       const ModelParams& p);

// Pr(omega = 1 | s, theta = H): the expert's own state posterior at signal s.
double signal_state_posterior(double s, const ModelParams& p);

// Success probability of the cutoff type herself: e* times her state posterior.
// This is what prices the risky-safe margin; the branch's success_prob is the
// market's tail-averaged assessment.
double marginal_success_prob(double s, const BranchDistribution& b, const ModelParams& p);

// Binary-signal benchmark with accuracies q_h > q_l > 1/2.
struct BinarySignalParams {
    double q_h = 0.0;
    double q_l = 0.0;
    void validate() const;
};

struct BinaryJumps {
    double l_plus = 0.0;   // q_h / q_l
    double l_minus = 0.0;  // (1-q_h) / (1-q_l)
    bool failure_more_diagnostic = false;  // q_h(1-q_h) <= q_l(1-q_l)
};

BinaryJumps binary_jumps(const BinarySignalParams& bp);

// Likelihood ratio of the recommendation alone when the good-state prior is alpha.
double binary_recommendation_lr(const BinarySignalParams& bp, double alpha);

}  // namespace repdyn
