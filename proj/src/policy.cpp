#include "repdyn/policy.hpp"

#include <algorithm>
#include <cmath>

namespace repdyn {

void BonusContract::validate() const {
    if (!(beta1 >= 0.0) || !(beta0 >= 0.0)) {
        throw std::invalid_argument("BonusContract: limited liability requires beta1, beta0 >= 0");
    }
}

namespace {

double rotation(double s, double pi, const ModelParams& p, const BranchDistribution& b,
                const BonusContract& c, BonusWeighting weighting) {
    if (weighting == BonusWeighting::StatePrior) {
        return p.lambda * c.beta1 - (1.0 - p.lambda) * c.beta0;
    }
    const double q = marginal_success_prob(s, b, p);
    (void)pi;
    return c.beta1 * q - c.beta0 * (1.0 - q);
}

}  // namespace

double bonus_advantage(double s, double pi, const ValueFunction& v, const ModelParams& p,
                       const BonusContract& contract, BonusWeighting weighting) {
    contract.validate();
    const BranchDistribution b = branch_distribution(pi, s, p);
    return risky_advantage(s, pi, v, p) + rotation(s, pi, p, b, contract, weighting);
}

CutoffResult bonus_cutoff(double pi, const ValueFunction& v, const ModelParams& p,
                          const BonusContract& contract, const SolveSettings& st,
                          BonusWeighting weighting) {
    contract.validate();
    MarginSpec spec;
    spec.beta1 = contract.beta1;
    spec.beta0 = contract.beta0;
    spec.state_prior_weighting = weighting == BonusWeighting::StatePrior;
    return solve_margin_cutoff(pi, v, p, st, spec);
}

double rho_of_bonus(double pi, const ValueFunction& v, const ModelParams& p, double beta1,
                    const SolveSettings& st) {
    const CutoffResult c = bonus_cutoff(pi, v, p, {beta1, 0.0}, st);
    return gaussian_tails(c.cutoff, p).r_h;
}

double rho_prime(double pi, const ValueFunction& v, const ModelParams& p, double beta1,
                 const SolveSettings& st) {
    const BonusContract contract{beta1, 0.0};
    const CutoffResult c = bonus_cutoff(pi, v, p, contract, st);
    if (c.clamped()) {
        throw IneffectiveInstrument("bonus has no first-order effect at pi=" +
                                    std::to_string(pi) + " (clamped cutoff)");
    }
    const double s = c.cutoff;
    const BranchDistribution b = branch_distribution(pi, s, p);
    const double q = marginal_success_prob(s, b, p);

    const double h = 1e-6 * (1.0 + std::abs(s));
    const double slope =
        (bonus_advantage(s + h, pi, v, p, contract) - bonus_advantage(s - h, pi, v, p, contract)) /
        (2.0 * h);
    if (!(slope > 0.0)) {
        throw IneffectiveInstrument("margin slope not positive at the bonus cutoff, pi=" +
                                    std::to_string(pi));
    }
    // R_H'(s) < 0 in the Gaussian tail family.
    const double rh_slope = -(p.lambda * normal_pdf((s - p.mu1) / p.sigma_h) +
                              (1.0 - p.lambda) * normal_pdf((s - p.mu0) / p.sigma_h)) /
                            p.sigma_h;
    const double ds_dbeta = -q / slope;
    return rh_slope * ds_dbeta;
}

double calibrate_bonus(double pi, const ValueFunction& v, const ModelParams& p,
                       double rho_target, const SolveSettings& st) {
    const double rho0 = rho_of_bonus(pi, v, p, 0.0, st);
    if (!(rho_target > rho0 && rho_target < 1.0)) {
        throw std::domain_error("calibrate_bonus: target must lie in (rho(pi;0), 1)");
    }
    double hi = 1.0;
    while (rho_of_bonus(pi, v, p, hi, st) < rho_target && hi < 1e9) hi *= 2.0;
    double lo = 0.0;
    double mid = hi;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double r = rho_of_bonus(pi, v, p, mid, st);
        if (std::abs(r - rho_target) <= 5e-7) return mid;
        (r < rho_target ? lo : hi) = mid;
    }
    const double r = rho_of_bonus(pi, v, p, mid, st);
    if (std::abs(r - rho_target) > 1e-6) {
        throw SolveError("calibrate_bonus: bisection failed to reach the target rate", {});
    }
    return mid;
}

MinimalTransfers minimal_transfers(double pi, double s_tilde, const ValueFunction& v,
                                   const ModelParams& p) {
    const double d = risky_advantage(s_tilde, pi, v, p);
    const BranchDistribution b = branch_distribution(pi, s_tilde, p);
    const double q = marginal_success_prob(s_tilde, b, p);

    MinimalTransfers out;
    if (d < 0.0) {
        if (q <= kDegenerateTol) {
            out.beta1_effective = false;  // no successes at the target cutoff
        } else {
            out.beta1_min = -d / q;
        }
    } else if (d > 0.0) {
        if (1.0 - q <= kDegenerateTol) {
            out.beta0_effective = false;
        } else {
            out.beta0_min = d / (1.0 - q);
        }
    }
    return out;
}

PlannerResult planner_local_bonus(const PlannerInputs& inputs, const EquilibriumSolution& sol,
                                  const SolveSettings& st) {
    if (inputs.pi_sample.empty()) {
        throw std::invalid_argument("planner_local_bonus: empty belief sample");
    }
    if (!(inputs.eta >= 0.0)) {
        throw std::invalid_argument("planner_local_bonus: eta must be >= 0");
    }
    const ModelParams& p = sol.params;
    const ValueFunction& v = sol.value;

    PlannerResult res;
    double gain = 0.0, rsucc = 0.0, curve = 0.0;
    for (double pi : inputs.pi_sample) {
        const CutoffResult c = solve_cutoff(pi, v, p, st);
        const BranchDistribution b = branch_distribution(pi, c.cutoff, p);
        const double rho = b.r_h;
        const double ps = b.success_prob;
        const double s_exp = inputs.surplus_b * ps - 0.5 * b.effort * b.effort;
        double rp = 0.0;
        if (!c.clamped()) {
            try {
                rp = rho_prime(pi, v, p, 0.0, st);
            } catch (const IneffectiveInstrument&) {
                ++res.clamped_points;
            }
        } else {
            ++res.clamped_points;
        }
        gain += rp * s_exp;
        rsucc += rho * ps;
        curve += rp * ps;
    }
    const double n = static_cast<double>(inputs.pi_sample.size());
    gain /= n;
    rsucc /= n;
    curve /= n;
    res.gain = gain;
    res.budget_term = inputs.eta * rsucc;
    res.curvature = inputs.eta * curve;

    if (res.clamped_points == static_cast<int>(inputs.pi_sample.size())) {
        throw IneffectiveInstrument("bonus instrument ineffective over the sampled support");
    }
    if (gain <= res.budget_term) {
        res.boundary_zero = true;
        res.beta_star = 0.0;
        return res;
    }
    if (inputs.eta == 0.0 || res.curvature <= 0.0) {
        res.unbounded = true;
        res.beta_star = std::numeric_limits<double>::infinity();
        return res;
    }
    res.beta_star = (gain - res.budget_term) / res.curvature;
    return res;
}

}  // namespace repdyn
