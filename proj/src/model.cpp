#include "repdyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repdyn {

double normal_cdf(double x) {
    // Phi(x) = erfc(-x / sqrt(2)) / 2. std::erfc keeps relative accuracy in the
    // lower tail, which matters because tails enter likelihood ratios.
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double logit(double p) {
    return std::log(p / (1.0 - p));
}

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

double clamp_belief(double p) {
    return std::min(std::max(p, kBeliefFloor), 1.0 - kBeliefFloor);
}

double apply_log_odds(double pi, double j) {
    if (!(pi > 0.0 && pi < 1.0)) {
        throw std::invalid_argument("apply_log_odds: pi must lie in (0,1)");
    }
    return clamp_belief(logistic(logit(pi) + j));
}

void ModelParams::validate() const {
    if (!(sigma_h > 0.0)) throw std::invalid_argument("ModelParams: sigmaH must be > 0");
    if (!(sigma_l >= sigma_h)) throw std::invalid_argument("ModelParams: sigmaL must be >= sigmaH");
    if (!(mu1 > mu0)) throw std::invalid_argument("ModelParams: mu1 must exceed mu0");
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("ModelParams: lambda must lie in (0,1)");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("ModelParams: delta must lie in [0,1)");
    if (!(phi >= 0.0)) throw std::invalid_argument("ModelParams: phi must be >= 0");
}

TailQuadruple gaussian_tails(double cutoff_h, const ModelParams& p) {
    const double cutoff_l = cutoff_h + p.delta_l;
    TailQuadruple t;
    t.a_h = 1.0 - normal_cdf((cutoff_h - p.mu1) / p.sigma_h);
    t.b_h = 1.0 - normal_cdf((cutoff_h - p.mu0) / p.sigma_h);
    t.a_l = 1.0 - normal_cdf((cutoff_l - p.mu1) / p.sigma_l);
    t.b_l = 1.0 - normal_cdf((cutoff_l - p.mu0) / p.sigma_l);
    t.r_h = p.lambda * t.a_h + (1.0 - p.lambda) * t.b_h;
    t.r_l = p.lambda * t.a_l + (1.0 - p.lambda) * t.b_l;
    return t;
}

double signal_state_posterior(double s, const ModelParams& p) {
    const double f1 = normal_pdf((s - p.mu1) / p.sigma_h);
    const double f0 = normal_pdf((s - p.mu0) / p.sigma_h);
    const double num = p.lambda * f1;
    const double den = num + (1.0 - p.lambda) * f0;
    if (den <= 0.0) {
        // Both densities underflowed; decide by which mean is closer.
        return s > 0.5 * (p.mu0 + p.mu1) ? 1.0 : 0.0;
    }
    return num / den;
}

double marginal_success_prob(double s, const BranchDistribution& b, const ModelParams& p) {
    return b.effort * signal_state_posterior(s, p);
}

BranchDistribution branch_distribution(double pi, double cutoff_h, const ModelParams& p) {
    return branch_distribution(pi, gaussian_tails(cutoff_h, p), p);
}

BranchDistribution branch_distribution(double pi, const TailQuadruple& t,
                                       const ModelParams& p) {
    if (!(pi > 0.0 && pi < 1.0)) {
        throw std::invalid_argument("branch_distribution: pi must lie in (0,1)");
    }
    BranchDistribution b;
    b.r_h = t.r_h;
    if (p.low_type == LowTypeBehavior::CutoffOffset) {
        b.r_l = t.r_l;
    } else {
        // Frequency-matching mimicry: the low type mixes signal-independently at
        // the high type's risky frequency, so recommendations carry no type
        // information and no state information under L.
        b.r_l = t.r_h;
    }

    const double risky_mass = pi * b.r_h + (1.0 - pi) * b.r_l;
    if (risky_mass > kDegenerateTol) {
        b.pi_rec1 = clamp_belief(pi * b.r_h / risky_mass);
    } else {
        b.pi_rec1 = clamp_belief(pi);
        b.degenerate = true;
    }
    const double safe_mass = pi * (1.0 - b.r_h) + (1.0 - pi) * (1.0 - b.r_l);
    if (safe_mass > kDegenerateTol) {
        b.pi_rec0 = clamp_belief(pi * (1.0 - b.r_h) / safe_mass);
    } else {
        b.pi_rec0 = clamp_belief(pi);
        b.degenerate = true;
    }

    if (b.r_h > kDegenerateTol) {
        b.p_h = p.lambda * t.a_h / b.r_h;
    } else {
        b.p_h = p.lambda;
        b.degenerate = true;
    }
    if (p.low_type == LowTypeBehavior::CutoffOffset) {
        if (b.r_l > kDegenerateTol) {
            b.p_l = p.lambda * t.a_l / b.r_l;
        } else {
            b.p_l = p.lambda;
            b.degenerate = true;
        }
    } else {
        b.p_l = p.lambda;  // a carries no omega-information under the mixing L type
    }

    b.lambda_post = b.pi_rec1 * b.p_h + (1.0 - b.pi_rec1) * b.p_l;
    b.effort = b.lambda_post;  // quadratic cost: e* = lambda_post
    b.success_prob = b.lambda_post * b.effort;

    b.j_plus = std::log(b.p_h / b.p_l);
    b.j_minus = std::log((1.0 - b.effort * b.p_h) / (1.0 - b.effort * b.p_l));
    b.pi_plus = apply_log_odds(b.pi_rec1, b.j_plus);
    b.pi_minus = apply_log_odds(b.pi_rec1, b.j_minus);

    b.entries[0] = {Observation::Safe, 1.0 - b.r_h, 1.0 - b.r_l, b.pi_rec0};
    b.entries[1] = {Observation::RiskySuccess,
                    b.r_h * b.effort * b.p_h,
                    b.r_l * b.effort * b.p_l,
                    b.pi_plus};
    b.entries[2] = {Observation::RiskyFailure,
                    b.r_h * (1.0 - b.effort * b.p_h),
                    b.r_l * (1.0 - b.effort * b.p_l),
                    b.pi_minus};
    return b;
}

void BinarySignalParams::validate() const {
    if (!(q_h > q_l && q_l > 0.5 && q_h < 1.0)) {
        throw std::invalid_argument("BinarySignalParams: need q_h > q_l > 1/2 and q_h < 1");
    }
}

BinaryJumps binary_jumps(const BinarySignalParams& bp) {
    bp.validate();
    BinaryJumps j;
    j.l_plus = bp.q_h / bp.q_l;
    j.l_minus = (1.0 - bp.q_h) / (1.0 - bp.q_l);
    j.failure_more_diagnostic = bp.q_h * (1.0 - bp.q_h) <= bp.q_l * (1.0 - bp.q_l);
    return j;
}

double binary_recommendation_lr(const BinarySignalParams& bp, double alpha) {
    bp.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("binary_recommendation_lr: alpha must lie in [0,1]");
    }
    const double num = alpha * bp.q_h + (1.0 - alpha) * (1.0 - bp.q_h);
    const double den = alpha * bp.q_l + (1.0 - alpha) * (1.0 - bp.q_l);
    return num / den;
}

}  // namespace repdyn
