#include "repdyn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace repdyn {

namespace {

constexpr double kSweepSlack = 1e-7;  // comparison slack for monotone-move checks

// FNV-1a, 64-bit.
struct Hasher {
    std::uint64_t h = 1469598103934665603ull;
    void feed_bytes(const void* data, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    }
    void feed(double x) { feed_bytes(&x, sizeof x); }
    void feed(int x) { feed_bytes(&x, sizeof x); }
};

}  // namespace

Grid Grid::uniform(int count, double lo, double hi) {
    if (count < 2) throw std::invalid_argument("Grid: need at least 2 points");
    Grid g;
    g.points.resize(count);
    for (int j = 0; j < count; ++j) {
        g.points[j] = lo + (hi - lo) * static_cast<double>(j) / (count - 1);
    }
    g.validate();
    return g;
}

void Grid::validate() const {
    if (points.size() < 2) throw std::invalid_argument("Grid: need at least 2 points");
    if (!(points.front() > 0.0 && points.back() < 1.0)) {
        throw std::invalid_argument("Grid: endpoints must lie strictly inside (0,1)");
    }
    for (std::size_t j = 1; j < points.size(); ++j) {
        if (!(points[j] > points[j - 1])) {
            throw std::invalid_argument("Grid: points must be strictly increasing");
        }
    }
}

double ValueFunction::operator()(double pi) const {
    const auto& x = grid.points;
    if (pi <= x.front()) return values.front() - (x.front() - pi) * ext_slope_lo;
    if (pi >= x.back()) return values.back() + (pi - x.back()) * ext_slope_hi;
    const auto it = std::upper_bound(x.begin(), x.end(), pi);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    if (x[j - 1] == pi) return values[j - 1];  // exact hits stay exact
    const double t = (pi - x[j - 1]) / (x[j] - x[j - 1]);
    return values[j - 1] + t * (values[j] - values[j - 1]);
}

ValueFunction ValueFunction::constant(const Grid& g, double c) {
    ValueFunction v;
    v.grid = g;
    v.values.assign(g.size(), c);
    return v;
}

void SolveSettings::validate() const {
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("SolveSettings: damping must lie in (0,1]");
    if (!(tolerance > 0.0)) throw std::invalid_argument("SolveSettings: tolerance must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("SolveSettings: maxIterations must be >= 1");
    if (bisection_iterations < 1) throw std::invalid_argument("SolveSettings: bisectionIterations must be >= 1");
    if (padding_cells < 0) throw std::invalid_argument("SolveSettings: paddingCells must be >= 0");
}

namespace {

double margin_from_branch(const BranchDistribution& b, double q, double pi,
                          const ValueFunction& v, const ModelParams& p) {
    const double risky = q * v(b.pi_plus) + (1.0 - q) * v(b.pi_minus);
    const double safe = p.safe_update == SafeUpdate::Freeze ? v(pi) : v(b.pi_rec0);
    return p.phi + p.delta * (risky - safe);
}

// One-step value at a grid point under the branch induced by a cutoff. The
// high type succeeds with chance e* p_H conditional on recommending risk
// (integrating her signal over the risky region).
double value_update_point(const BranchDistribution& b, double pi, const ValueFunction& v,
                          const ModelParams& p) {
    const double succ = b.effort * b.p_h;
    const double risky = succ * v(b.pi_plus) + (1.0 - succ) * v(b.pi_minus);
    const double safe = p.safe_update == SafeUpdate::Freeze ? v(pi) : v(b.pi_rec0);
    return p.flow(pi) + p.phi * b.r_h + p.delta * (b.r_h * risky + (1.0 - b.r_h) * safe);
}

}  // namespace

double risky_advantage(double s, double pi, const ValueFunction& v, const ModelParams& p) {
    const BranchDistribution b = branch_distribution(pi, s, p);
    const double q = marginal_success_prob(s, b, p);
    return margin_from_branch(b, q, pi, v, p);
}

namespace {

double margin_tie_tol(const ValueFunction& v) {
    double vmax = 0.0;
    for (double x : v.values) vmax = std::max(vmax, std::abs(x));
    return 1e-10 * (1.0 + vmax);
}

// Margin at a fixed conjecture, as a function of the expert's state posterior
// w: margin(w) = c + d w. All module margins fit this form.
struct AffineMargin {
    double c = 0.0;
    double d = 0.0;
};

AffineMargin margin_coefficients(double pi, double conjecture, const ValueFunction& v,
                                 const ModelParams& p, const MarginSpec& spec) {
    const BranchDistribution b = branch_distribution(pi, conjecture, p);
    const double v_plus = v(b.pi_plus);
    const double v_minus = v(b.pi_minus);
    const double v_safe = p.safe_update == SafeUpdate::Freeze ? v(pi) : v(b.pi_rec0);

    AffineMargin m;
    if (spec.committee) {
        const double v_here = v(pi);
        m.c = p.phi + p.delta * (spec.zeta * (v_minus - v_here) - (v_here - v_safe));
        m.d = b.effort * p.delta * spec.zeta * (v_plus - v_minus);
    } else {
        m.c = p.phi + p.delta * (v_minus - v_safe);
        m.d = b.effort * p.delta * (v_plus - v_minus);
    }
    if (spec.state_prior_weighting) {
        m.c += p.lambda * spec.beta1 - (1.0 - p.lambda) * spec.beta0;
    } else {
        m.c -= spec.beta0;
        m.d += b.effort * (spec.beta1 + spec.beta0);
    }
    return m;
}

struct BestReply {
    double cutoff;
    bool at_low, at_high, tie;
};

// Inverts margin(w) = 0 through w(s); see the MarginSpec note in the header.
BestReply best_reply(double pi, double conjecture, const ValueFunction& v,
                     const ModelParams& p, const MarginSpec& spec, double lo, double hi,
                     double tie_tol) {
    const AffineMargin m = margin_coefficients(pi, conjecture, v, p, spec);
    if (std::abs(m.d) <= tie_tol) {
        if (m.c > tie_tol) return {lo, true, false, false};
        if (m.c < -tie_tol) return {hi, false, true, false};
        return {lo, true, false, true};  // indifferent everywhere: risky side
    }
    if (m.d < 0.0) {
        // Downside exceeds upside; risky could only attract low signals, which
        // is not a cutoff-from-above policy. Clamp by the prevailing sign.
        return m.c + m.d > 0.0 ? BestReply{lo, true, false, false}
                               : BestReply{hi, false, true, false};
    }
    const double w_star = -m.c / m.d;
    if (w_star <= 0.0) return {lo, true, false, false};
    if (w_star >= 1.0) return {hi, false, true, false};
    // w(s) = logistic(logit(lambda) + (mu1-mu0)(s - (mu0+mu1)/2)/sigmaH^2)
    const double s = 0.5 * (p.mu0 + p.mu1) +
                     (logit(w_star) - logit(p.lambda)) * p.sigma_h * p.sigma_h /
                         (p.mu1 - p.mu0);
    if (s <= lo) return {lo, true, false, false};
    if (s >= hi) return {hi, false, true, false};
    return {s, false, false, false};
}

}  // namespace

CutoffResult solve_margin_cutoff(double pi, const ValueFunction& v, const ModelParams& p,
                                 const SolveSettings& st, const MarginSpec& spec) {
    if (!(pi > 0.0 && pi < 1.0)) {
        throw std::invalid_argument("solve_margin_cutoff: pi must lie in (0,1)");
    }
    const double lo = st.bracket_lo(p);
    const double hi = st.bracket_hi(p);
    const double tie_tol = margin_tie_tol(v);
    const double step_tol = 1e-12 * (hi - lo);

    double conjecture = 0.5 * (p.mu0 + p.mu1);
    BestReply r{conjecture, false, false, false};
    for (int it = 0; it < 4 * st.max_iterations; ++it) {
        r = best_reply(pi, conjecture, v, p, spec, lo, hi, tie_tol);
        if (!std::isfinite(r.cutoff)) {
            throw SolveError("non-finite best reply at pi=" + std::to_string(pi), {});
        }
        const double next = (1.0 - st.damping) * conjecture + st.damping * r.cutoff;
        const double moved = std::abs(next - conjecture);
        conjecture = next;
        if (moved < step_tol) break;
    }
    r = best_reply(pi, conjecture, v, p, spec, lo, hi, tie_tol);

    CutoffResult out;
    out.cutoff = r.cutoff;
    out.clamped_low = r.at_low;
    out.clamped_high = r.at_high;
    out.tie_zero = r.tie;
    if (!r.at_low && !r.at_high) {
        // Polish with bisection on the diagonal margin so interior cutoffs zero
        // it to the bisection resolution.
        auto margin = [&](double s) {
            const AffineMargin m = margin_coefficients(pi, s, v, p, spec);
            const double d = m.c + m.d * signal_state_posterior(s, p);
            if (!std::isfinite(d)) {
                throw SolveError("non-finite margin at pi=" + std::to_string(pi) +
                                     ", s=" + std::to_string(s),
                                 {});
            }
            return d;
        };
        double w = 1e-4 * (hi - lo);
        for (int widen = 0; widen < 3; ++widen, w *= 8.0) {
            double a = std::max(lo, out.cutoff - w);
            double b = std::min(hi, out.cutoff + w);
            double fa = margin(a);
            if ((fa >= 0.0) == (margin(b) >= 0.0)) continue;
            for (int k = 0; k < st.bisection_iterations; ++k) {
                const double mid = 0.5 * (a + b);
                const double fm = margin(mid);
                if ((fm >= 0.0) == (fa >= 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            out.cutoff = 0.5 * (a + b);
            break;
        }
    }
    return out;
}

CutoffResult solve_cutoff(double pi, const ValueFunction& v, const ModelParams& p,
                          const SolveSettings& st) {
    return solve_margin_cutoff(pi, v, p, st, MarginSpec{});
}

std::vector<double> bellman_sweep(const ValueFunction& v, const ModelParams& p,
                                  const SolveSettings& st) {
    const auto& grid = v.grid.points;
    std::vector<double> raw(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const CutoffResult c = solve_cutoff(grid[j], v, p, st);
        const BranchDistribution b = branch_distribution(grid[j], c.cutoff, p);
        raw[j] = value_update_point(b, grid[j], v, p);
    }
    return raw;
}

std::vector<double> bellman_apply(const ValueFunction& v, const std::vector<double>& cutoffs,
                                  const ModelParams& p) {
    const auto& grid = v.grid.points;
    if (cutoffs.size() != grid.size()) {
        throw std::invalid_argument("bellman_apply: one cutoff per grid point required");
    }
    std::vector<double> raw(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const BranchDistribution b = branch_distribution(grid[j], cutoffs[j], p);
        raw[j] = value_update_point(b, grid[j], v, p);
    }
    return raw;
}


EquilibriumSolution solve_equilibrium(const ModelParams& p, const Grid& request,
                                      const SolveSettings& st) {
    p.validate();
    st.validate();
    request.validate();

    // Solve on a padded copy of the requested grid.
    Grid grid;
    const double h_lo = request.points[1] - request.points[0];
    const double h_hi = request.points[request.size() - 1] - request.points[request.size() - 2];
    int pad_lo = st.padding_cells, pad_hi = st.padding_cells;
    while (pad_lo > 0 && request.points.front() - pad_lo * h_lo <= kBeliefFloor) --pad_lo;
    while (pad_hi > 0 && request.points.back() + pad_hi * h_hi >= 1.0 - kBeliefFloor) --pad_hi;
    for (int j = pad_lo; j >= 1; --j) grid.points.push_back(request.points.front() - j * h_lo);
    grid.points.insert(grid.points.end(), request.points.begin(), request.points.end());
    for (int j = 1; j <= pad_hi; ++j) grid.points.push_back(request.points.back() + j * h_hi);
    grid.validate();

    EquilibriumSolution sol;
    sol.params = p;
    sol.settings = st;
    sol.value.grid = grid;
    sol.value.values.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        sol.value.values[j] = p.flow(grid.points[j]) / (1.0 - p.delta);
    }
    auto refresh_ext_slopes = [&]() {
        const auto& x = grid.points;
        const auto& vv = sol.value.values;
        const std::size_t m = x.size();
        sol.value.ext_slope_lo = (vv[1] - vv[0]) / (x[1] - x[0]);
        sol.value.ext_slope_hi = (vv[m - 1] - vv[m - 2]) / (x[m - 1] - x[m - 2]);
    };
    // Extend the value function past the grid with the edge-cell slope, lagged
    // one sweep: within a sweep the slope is a constant, so each sweep stays a
    // delta-contraction, and at the fixed point the extension is C1 with the
    // interior. Clamping flat instead makes failure costless at the bottom
    // point and seeds spurious equilibrium branches along the lower cells.
    refresh_ext_slopes();

    const double lo = st.bracket_lo(p);
    const double hi = st.bracket_hi(p);
    const std::size_t n = grid.size();

    // Damped best-reply iteration on the conjectured cutoff, interleaved with
    // damped value updates. The best reply against a conjecture is unique and
    // closed-form, so the coupled iteration has no root-selection jumps.
    std::vector<double> conjecture(n, 0.5 * (p.mu0 + p.mu1));
    std::vector<BestReply> reply(n);

    double vmax0 = 0.0;
    for (double x : sol.value.values) vmax0 = std::max(vmax0, std::abs(x));
    const double cutoff_tol = 1e-8 * (hi - lo);

    std::vector<double> residuals;
    residuals.reserve(256);
    bool converged = false;
    int it = 0;
    for (; it < st.max_iterations; ++it) {
        double vmax = 0.0;
        for (double x : sol.value.values) vmax = std::max(vmax, std::abs(x));
        const double tie_tol = 1e-10 * (1.0 + vmax);

        refresh_ext_slopes();
        double res_v = 0.0, res_s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            reply[j] = best_reply(grid.points[j], conjecture[j], sol.value, p,
                                  MarginSpec{}, lo, hi, tie_tol);
            const double next_s =
                (1.0 - st.damping) * conjecture[j] + st.damping * reply[j].cutoff;
            res_s = std::max(res_s, std::abs(next_s - conjecture[j]));
            conjecture[j] = next_s;
        }
        for (std::size_t j = 0; j < n; ++j) {
            const BranchDistribution b = branch_distribution(grid.points[j], conjecture[j], p);
            if (!std::isfinite(b.pi_plus) || !std::isfinite(b.pi_minus)) {
                throw SolveError("non-finite branch at pi=" + std::to_string(grid.points[j]),
                                 residuals);
            }
            const double raw = value_update_point(b, grid.points[j], sol.value, p);
            // a fixed point stays fixed: damping 0.6x + 0.4x can drift by an ulp
            const double next = raw == sol.value.values[j]
                                    ? raw
                                    : (1.0 - st.damping) * sol.value.values[j] +
                                          st.damping * raw;
            res_v = std::max(res_v, std::abs(next - sol.value.values[j]));
            sol.value.values[j] = next;
        }
        residuals.push_back(res_v);
        if (res_v < st.tolerance && res_s < cutoff_tol) {
            converged = true;
            ++it;
            break;
        }
    }
    if (!converged) {
        throw SolveError("value iteration did not converge within " +
                             std::to_string(st.max_iterations) + " sweeps (residual " +
                             std::to_string(residuals.back()) + ")",
                         residuals);
    }
    sol.iterations = it;
    sol.sup_norm_residual = residuals.back();

    // Final policy table on the requested points: undamped best replies at the
    // converged state. At the fixed point the reply equals the conjecture, so
    // the recorded cutoff zeroes the diagonal margin.
    double vmax = 0.0;
    for (double x : sol.value.values) vmax = std::max(vmax, std::abs(x));
    const double tie_tol = 1e-10 * (1.0 + vmax);
    sol.points.resize(request.size());
    for (std::size_t j = 0; j < request.size(); ++j) {
        PolicyPoint& pt = sol.points[j];
        pt.pi = request.points[j];
        const BestReply r = best_reply(pt.pi, conjecture[j + pad_lo], sol.value, p,
                                       MarginSpec{}, lo, hi, tie_tol);
        pt.cutoff = r.cutoff;
        pt.clamped_low = r.at_low;
        pt.clamped_high = r.at_high;
        pt.tie_zero = r.tie;
        if (!r.at_low && !r.at_high) {
            // Polish with bisection so the recorded cutoff zeroes the margin to
            // the bisection resolution, not just to the damping tolerance.
            auto margin = [&](double s) { return risky_advantage(s, pt.pi, sol.value, p); };
            double w = 1e-4 * (hi - lo);
            for (int widen = 0; widen < 3; ++widen, w *= 8.0) {
                double a = std::max(lo, pt.cutoff - w);
                double b = std::min(hi, pt.cutoff + w);
                const double fa = margin(a), fb = margin(b);
                if ((fa >= 0.0) != (fb >= 0.0)) {
                    double fa2 = fa;
                    for (int k = 0; k < st.bisection_iterations; ++k) {
                        const double m = 0.5 * (a + b);
                        const double fm = margin(m);
                        if ((fm >= 0.0) == (fa2 >= 0.0)) {
                            a = m;
                            fa2 = fm;
                        } else {
                            b = m;
                        }
                    }
                    pt.cutoff = 0.5 * (a + b);
                    break;
                }
            }
        }
        pt.branch = branch_distribution(pt.pi, pt.cutoff, p);
        pt.rho = pt.branch.r_h;
    }
    return sol;
}

std::uint64_t EquilibriumSolution::content_hash() const {
    Hasher h;
    h.feed(params.mu0);
    h.feed(params.mu1);
    h.feed(params.sigma_h);
    h.feed(params.sigma_l);
    h.feed(params.lambda);
    h.feed(params.delta);
    h.feed(params.phi);
    h.feed(params.delta_l);
    h.feed(static_cast<int>(params.safe_update));
    h.feed(static_cast<int>(params.low_type));
    for (double x : value.grid.points) h.feed(x);
    for (double x : value.values) h.feed(x);
    for (const auto& pt : points) {
        h.feed(pt.cutoff);
        h.feed(pt.rho);
        h.feed(pt.branch.pi_rec1);
        h.feed(pt.branch.pi_rec0);
        h.feed(pt.branch.pi_plus);
        h.feed(pt.branch.pi_minus);
        h.feed(static_cast<int>(pt.clamped_low) + 2 * static_cast<int>(pt.clamped_high));
    }
    return h.h;
}

std::vector<std::pair<double, double>> experimentation_rate(const EquilibriumSolution& sol) {
    std::vector<std::pair<double, double>> out;
    out.reserve(sol.points.size());
    for (const auto& pt : sol.points) out.emplace_back(pt.pi, pt.rho);
    return out;
}

int SweepReport::total_violations() const {
    int n = 0;
    for (const auto& s : steps) n += s.violations;
    return n;
}

SweepReport comparative_sweep(const ModelParams& base, SweepAxis axis,
                              const std::vector<double>& values, const Grid& grid,
                              const SolveSettings& st) {
    if (values.size() < 2) {
        throw std::invalid_argument("comparative_sweep: need at least 2 axis values");
    }
    SweepReport rep;
    rep.axis = axis;
    rep.values = values;

    std::vector<std::vector<bool>> clamped;
    for (double val : values) {
        ModelParams p = base;
        switch (axis) {
            case SweepAxis::SigmaH: p.sigma_h = val; break;
            case SweepAxis::Lambda: p.lambda = val; break;
            case SweepAxis::Delta: p.delta = val; break;
        }
        const EquilibriumSolution sol = solve_equilibrium(p, grid, st);
        std::vector<double> cuts, rhos;
        std::vector<bool> cl;
        for (const auto& pt : sol.points) {
            cuts.push_back(pt.cutoff);
            rhos.push_back(pt.rho);
            cl.push_back(pt.clamped());
        }
        rep.cutoffs.push_back(std::move(cuts));
        rep.rhos.push_back(std::move(rhos));
        clamped.push_back(std::move(cl));
    }

    // Theorem direction of ds*/d(axis): sigmaH +, lambda -, delta +.
    int theorem_sign = 0;
    switch (axis) {
        case SweepAxis::SigmaH: theorem_sign = +1; break;
        case SweepAxis::Lambda: theorem_sign = -1; break;
        case SweepAxis::Delta: theorem_sign = +1; break;
    }

    for (std::size_t v = 1; v < values.size(); ++v) {
        SweepStep step;
        step.from_value = values[v - 1];
        step.to_value = values[v];
        const int dir = values[v] > values[v - 1] ? +1 : -1;
        step.expected_sign = theorem_sign * dir;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (clamped[v - 1][j] || clamped[v][j]) continue;
            ++step.compared_points;
            const double move = rep.cutoffs[v][j] - rep.cutoffs[v - 1][j];
            if (move * step.expected_sign < -kSweepSlack) {
                ++step.violations;
                step.violating_pis.push_back(grid.points[j]);
            }
        }
        rep.steps.push_back(std::move(step));
    }
    return rep;
}

std::vector<DiagnosticityRow> diagnosticity_at_cutoff(const EquilibriumSolution& sol) {
    std::vector<DiagnosticityRow> rows;
    rows.reserve(sol.points.size());
    for (const auto& pt : sol.points) {
        DiagnosticityRow r;
        r.pi = pt.pi;
        r.slack = pt.branch.j_plus + pt.branch.j_minus;
        r.holds = r.slack <= 0.0;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace repdyn
