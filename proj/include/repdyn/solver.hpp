#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "repdyn/model.hpp"

namespace repdyn {

struct Grid {
    std::vector<double> points;

    static Grid uniform(int count = 321, double lo = 0.05, double hi = 0.95);
    void validate() const;  // strictly increasing, strictly inside (0,1)
    std::size_t size() const { return points.size(); }
};

// Piecewise-linear value function on a reputation grid. Outside the grid range
// the evaluation extends from the edge value with a fixed slope (default 0,
// i.e. clamping). The solver sets the myopic slope u'(edge)/(1-delta) there:
// clamping flat makes failure costless at the bottom grid point, which opens a
// no-learning trap and destabilizes the cutoff fixed point in the first cells.
// A fixed slope restores the downside while keeping the Bellman update a
// delta-contraction (the extension depends on V only through the edge value).
struct ValueFunction {
    Grid grid;
    std::vector<double> values;
    double ext_slope_lo = 0.0;
    double ext_slope_hi = 0.0;

    double operator()(double pi) const;
    static ValueFunction constant(const Grid& g, double c);
};

struct SolveSettings {
    double damping = 0.4;
    double tolerance = 1e-6;
    int max_iterations = 10000;
    int bisection_iterations = 80;
    // Bracket is [mu0 - bracket_sigmas*sigmaH, mu1 + bracket_sigmas*sigmaH].
    double bracket_sigmas = 6.0;
    // Cells of the same spacing added beyond each grid end while solving, so
    // posteriors of reported points land on solved cells rather than on the
    // extrapolated edge. Reported points are unchanged.
    int padding_cells = 16;

    void validate() const;
    double bracket_lo(const ModelParams& p) const { return p.mu0 - bracket_sigmas * p.sigma_h; }
    double bracket_hi(const ModelParams& p) const { return p.mu1 + bracket_sigmas * p.sigma_h; }
};

class SolveError : public std::runtime_error {
  public:
    SolveError(const std::string& msg, std::vector<double> residuals)
        : std::runtime_error(msg), residual_history(std::move(residuals)) {}
    std::vector<double> residual_history;
};

// Risky-minus-safe continuation difference for the high type whose signal sits
// at the candidate cutoff s. The branch posteriors are public objects; the
// success chance is the cutoff type's own (marginal_success_prob).
double risky_advantage(double s, double pi, const ValueFunction& v, const ModelParams& p);

struct CutoffResult {
    double cutoff = 0.0;
    bool clamped_low = false;   // risky everywhere on the bracket
    bool clamped_high = false;  // safe everywhere on the bracket
    bool tie_zero = false;      // margin indistinguishable from zero everywhere
    bool clamped() const { return clamped_low || clamped_high; }
};

// Every module margin is affine in the expert's state posterior w(s) once the
// branch objects are pinned by the conjectured cutoff, so the indifference
// point inverts in closed form and the cutoff is the fixed point of a damped
// best-reply iteration. MarginSpec selects the family: the plain equilibrium
// margin, transfer rotations (bonus module), or the pivot-scaled committee
// decomposition.
struct MarginSpec {
    double zeta = 1.0;       // pivot weight on the outcome option value
    bool committee = false;  // anchor the option value at V(pi), subtract V(pi)-V(piRec0)
    double beta1 = 0.0;
    double beta0 = 0.0;
    bool state_prior_weighting = false;  // weight transfers by lambda, not success prob
};

CutoffResult solve_margin_cutoff(double pi, const ValueFunction& v, const ModelParams& p,
                                 const SolveSettings& st, const MarginSpec& spec);

CutoffResult solve_cutoff(double pi, const ValueFunction& v, const ModelParams& p,
                          const SolveSettings& st);

struct PolicyPoint {
    double pi = 0.0;
    double cutoff = 0.0;
    double rho = 0.0;  // R_H at the cutoff
    BranchDistribution branch;
    bool clamped_low = false;
    bool clamped_high = false;
    bool tie_zero = false;
    bool clamped() const { return clamped_low || clamped_high; }
};

struct EquilibriumSolution {
    ModelParams params;
    SolveSettings settings;
    ValueFunction value;
    std::vector<PolicyPoint> points;
    int iterations = 0;
    double sup_norm_residual = 0.0;

    std::uint64_t content_hash() const;
};

// One undamped Bellman sweep against v (cutoffs re-solved per point).
std::vector<double> bellman_sweep(const ValueFunction& v, const ModelParams& p,
                                  const SolveSettings& st);

// One undamped sweep under a fixed cutoff policy (one cutoff per grid point).
// The fixed-policy operator is a sup-norm contraction with modulus delta,
// which is what the contraction property asserts.
std::vector<double> bellman_apply(const ValueFunction& v, const std::vector<double>& cutoffs,
                                  const ModelParams& p);

// Damped value iteration per the replication recipe; throws SolveError with the
// residual history on non-convergence.
EquilibriumSolution solve_equilibrium(const ModelParams& p, const Grid& grid,
                                      const SolveSettings& st);

std::vector<std::pair<double, double>> experimentation_rate(const EquilibriumSolution& sol);

enum class SweepAxis { SigmaH, Lambda, Delta };

struct SweepStep {
    double from_value = 0.0;
    double to_value = 0.0;
    // Expected direction of the cutoff move: +1 up, -1 down.
    int expected_sign = 0;
    int violations = 0;        // interior points moving strictly the wrong way
    int compared_points = 0;   // points unclamped in both solutions
    std::vector<double> violating_pis;
};

struct SweepReport {
    SweepAxis axis;
    std::vector<double> values;
    std::vector<SweepStep> steps;
    std::vector<std::vector<double>> cutoffs;  // per value, per grid point
    std::vector<std::vector<double>> rhos;
    int total_violations() const;
};

SweepReport comparative_sweep(const ModelParams& base, SweepAxis axis,
                              const std::vector<double>& values, const Grid& grid,
                              const SolveSettings& st);

struct DiagnosticityRow {
    double pi = 0.0;
    double slack = 0.0;  // j_plus + j_minus at the solved cutoff
    bool holds = false;  // slack <= 0: failures at least as diagnostic
};

std::vector<DiagnosticityRow> diagnosticity_at_cutoff(const EquilibriumSolution& sol);

}  // namespace repdyn
