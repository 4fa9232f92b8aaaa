#include "repdyn/verify.hpp"

#include <algorithm>
#include <cmath>

#include "repdyn/committee.hpp"
#include "repdyn/io.hpp"
#include "repdyn/measure.hpp"
#include "repdyn/policy.hpp"

namespace repdyn {

namespace {

std::string num(double x) { return format_sig12(x); }

CheckResult check(const std::string& name, bool pass, const std::string& detail) {
    return {name, pass, detail};
}

}  // namespace

std::vector<CTRow> ct_coefficients_direct(const EquilibriumSolution& sol) {
    // Re-derivation from the primitives; deliberately does not call
    // branch_distribution or ct_coefficients.
    const ModelParams& p = sol.params;
    std::vector<CTRow> rows;
    rows.reserve(sol.points.size());
    for (const auto& pt : sol.points) {
        const double s = pt.cutoff;
        const double a_h = 0.5 * std::erfc((s - p.mu1) / (p.sigma_h * M_SQRT2));
        const double b_h = 0.5 * std::erfc((s - p.mu0) / (p.sigma_h * M_SQRT2));
        const double r_h = p.lambda * a_h + (1.0 - p.lambda) * b_h;
        double r_l, p_l;
        if (p.low_type == LowTypeBehavior::CutoffOffset) {
            const double sl = s + p.delta_l;
            const double a_l = 0.5 * std::erfc((sl - p.mu1) / (p.sigma_l * M_SQRT2));
            const double b_l = 0.5 * std::erfc((sl - p.mu0) / (p.sigma_l * M_SQRT2));
            r_l = p.lambda * a_l + (1.0 - p.lambda) * b_l;
            p_l = r_l > kDegenerateTol ? p.lambda * a_l / r_l : p.lambda;
        } else {
            r_l = r_h;
            p_l = p.lambda;
        }
        const double pi = pt.pi;
        const double mass = pi * r_h + (1.0 - pi) * r_l;
        const double rec1 =
            mass > kDegenerateTol ? clamp_belief(pi * r_h / mass) : clamp_belief(pi);
        const double p_h = r_h > kDegenerateTol ? p.lambda * a_h / r_h : p.lambda;
        const double lpost = rec1 * p_h + (1.0 - rec1) * p_l;
        const double effort = lpost;
        const double j_plus = std::log(p_h / p_l);
        const double j_minus = std::log((1.0 - effort * p_h) / (1.0 - effort * p_l));
        const double intensity = lpost * effort;

        CTRow r;
        r.pi = pi;
        r.rho = r_h;
        r.intensity = intensity;
        r.mu = r_h * (intensity * j_plus + (1.0 - intensity) * j_minus);
        r.sigma2 =
            r_h * (intensity * j_plus * j_plus + (1.0 - intensity) * j_minus * j_minus);
        rows.push_back(r);
    }
    return rows;
}

std::vector<CheckResult> verify_solution(const EquilibriumSolution& sol) {
    std::vector<CheckResult> out;
    const ModelParams& p = sol.params;

    // Bayes martingale identity.
    const double bayes = bayes_consistency_residual(sol);
    out.push_back(check("bayesConsistency", bayes < 1e-10, "max residual " + num(bayes)));

    // Branch rows sum to one.
    double worst_row = 0.0;
    for (const auto& pt : sol.points) {
        double sh = 0.0, sl = 0.0;
        for (const auto& e : pt.branch.entries) {
            sh += e.prob_h;
            sl += e.prob_l;
        }
        worst_row = std::max({worst_row, std::abs(sh - 1.0), std::abs(sl - 1.0)});
    }
    out.push_back(check("branchRowSums", worst_row < 1e-12, "max |sum-1| " + num(worst_row)));

    // Posterior ordering pi+ > piRec1 > pi- wherever J+ > 0 > J-.
    bool order_ok = true;
    for (const auto& pt : sol.points) {
        const auto& b = pt.branch;
        if (b.j_plus > 0.0 && b.j_minus < 0.0 &&
            !(b.pi_plus > b.pi_rec1 && b.pi_rec1 > b.pi_minus)) {
            order_ok = false;
            break;
        }
    }
    out.push_back(check("posteriorOrdering", order_ok, "pi+ > piRec1 > pi-"));

    // Monotone value.
    int v_viol = 0;
    for (std::size_t j = 1; j < sol.value.values.size(); ++j) {
        if (sol.value.values[j] < sol.value.values[j - 1] - 1e-8) ++v_viol;
    }
    out.push_back(check("valueMonotone", v_viol == 0, std::to_string(v_viol) + " drops"));

    // Conservatism on unclamped points.
    int s_viol = 0, rho_viol = 0;
    for (std::size_t j = 0; j + 1 < sol.points.size(); ++j) {
        if (sol.points[j].clamped() || sol.points[j + 1].clamped()) continue;
        if (sol.points[j + 1].cutoff < sol.points[j].cutoff - 1e-9) ++s_viol;
        if (sol.points[j + 1].rho > sol.points[j].rho + 1e-9) ++rho_viol;
    }
    out.push_back(check("cutoffMonotone", s_viol == 0, std::to_string(s_viol) + " drops"));
    out.push_back(check("rhoMonotone", rho_viol == 0, std::to_string(rho_viol) + " rises"));

    // Margin zero at interior cutoffs.
    double worst_margin = 0.0;
    for (const auto& pt : sol.points) {
        if (pt.clamped()) continue;
        worst_margin =
            std::max(worst_margin, std::abs(risky_advantage(pt.cutoff, pt.pi, sol.value, p)));
    }
    out.push_back(check("marginZeroAtCutoff", worst_margin < 1e-8,
                        "max |margin| " + num(worst_margin)));

    // Single crossing on a dense scan (tolerance band around zero).
    const SolveSettings& st = sol.settings;
    const double lo = st.bracket_lo(p), hi = st.bracket_hi(p);
    double vmax = 0.0;
    for (double x : sol.value.values) vmax = std::max(vmax, std::abs(x));
    const double band = 1e-10 * (1.0 + vmax);
    int worst_changes = 0;
    for (const auto& pt : sol.points) {
        int changes = 0;
        double prev = 0.0;
        bool have = false;
        for (int i = 0; i < 2000; ++i) {
            const double s = lo + (hi - lo) * i / 1999.0;
            const double d = risky_advantage(s, pt.pi, sol.value, p);
            if (std::abs(d) <= band) continue;
            if (have && (d > 0.0) != (prev > 0.0)) ++changes;
            prev = d;
            have = true;
        }
        worst_changes = std::max(worst_changes, changes);
    }
    out.push_back(check("singleCrossing", worst_changes <= 1,
                        "max strict sign changes " + std::to_string(worst_changes)));

    // Closed-form drift signs.
    double min_h = 1.0, max_l = -1.0, min_kl = 1.0;
    for (const auto& r : drift_and_kl(sol)) {
        min_h = std::min(min_h, r.drift_h);
        max_l = std::max(max_l, r.drift_l);
        min_kl = std::min(min_kl, r.kl_drift);
    }
    out.push_back(check("driftSigns", min_h >= -1e-12 && max_l <= 1e-12 && min_kl >= -1e-12,
                        "min driftH " + num(min_h) + ", max driftL " + num(max_l)));

    // Dual-route continuous-time coefficients.
    const auto ct = ct_coefficients(sol);
    const auto ct2 = ct_coefficients_direct(sol);
    double ct_diff = 0.0;
    for (std::size_t j = 0; j < ct.size(); ++j) {
        ct_diff = std::max({ct_diff, std::abs(ct[j].mu - ct2[j].mu),
                            std::abs(ct[j].sigma2 - ct2[j].sigma2)});
    }
    out.push_back(check("ctDualRoute", ct_diff <= 1e-12, "max |diff| " + num(ct_diff)));

    return out;
}

namespace {

CheckResult contraction_check(const EquilibriumSolution& sol) {
    const ModelParams& p = sol.params;
    // Fixed policy: the solved cutoffs, extended over the value grid by
    // nearest-point lookup.
    const auto& grid = sol.value.grid.points;
    std::vector<double> cutoffs(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double pi = grid[j];
        std::size_t best = 0;
        double dist = 2.0;
        for (std::size_t i = 0; i < sol.points.size(); ++i) {
            const double d = std::abs(sol.points[i].pi - pi);
            if (d < dist) {
                dist = d;
                best = i;
            }
        }
        cutoffs[j] = sol.points[best].cutoff;
    }

    ValueFunction v1 = sol.value;
    ValueFunction v2 = sol.value;
    for (std::size_t j = 0; j < v2.values.size(); ++j) {
        v2.values[j] += 0.5 + 0.2 * std::sin(7.0 * grid[j]);
    }
    const auto t1 = bellman_apply(v1, cutoffs, p);
    const auto t2 = bellman_apply(v2, cutoffs, p);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < t1.size(); ++j) {
        lhs = std::max(lhs, std::abs(t1[j] - t2[j]));
        rhs = std::max(rhs, std::abs(v1.values[j] - v2.values[j]));
    }
    const bool pass = lhs <= p.delta * rhs + 1e-12;
    return {"contraction", pass,
            "|TV1-TV2| " + num(lhs) + " vs delta|V1-V2| " + num(p.delta * rhs)};
}

}  // namespace

std::vector<CheckResult> verify_full(const ModelParams& p, const Grid& grid,
                                     const SolveSettings& st) {
    std::vector<CheckResult> out;
    const EquilibriumSolution sol = solve_equilibrium(p, grid, st);
    out.push_back(check("converged", sol.sup_norm_residual < st.tolerance,
                        "residual " + num(sol.sup_norm_residual) + " after " +
                            std::to_string(sol.iterations) + " sweeps"));
    for (auto& c : verify_solution(sol)) out.push_back(std::move(c));
    out.push_back(contraction_check(sol));

    // Comparative-statics sweeps.
    struct Axis {
        SweepAxis axis;
        std::vector<double> values;
        const char* name;
    };
    const double d_hi = std::min(0.95, p.delta);
    const Axis axes[] = {
        {SweepAxis::SigmaH, {p.sigma_h, p.sigma_h + 0.2}, "sweepSigmaH"},
        {SweepAxis::Lambda, {p.lambda, std::min(0.95, p.lambda + 0.1)}, "sweepLambda"},
        {SweepAxis::Delta, {std::max(0.05, d_hi - 0.05), d_hi}, "sweepDelta"},
    };
    for (const auto& ax : axes) {
        const SweepReport rep = comparative_sweep(p, ax.axis, ax.values, grid, st);
        const int viol = rep.total_violations();
        out.push_back(check(ax.name, viol == 0,
                            std::to_string(viol) + " of " +
                                std::to_string(rep.steps[0].compared_points) +
                                " interior points moved against the theorem"));
    }

    // Module oracles.
    {
        CounterRng rng = CounterRng::substream(20240801, 0);
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 2 + static_cast<int>(rng.next_uniform() * 12);
            CommitteeSpec spec;
            spec.n = n;
            spec.threshold_k = 1 + static_cast<int>(rng.next_uniform() * n);
            spec.lambda = 0.2 + 0.6 * rng.next_uniform();
            spec.shared = false;
            for (int w = 0; w < 2; ++w) {
                spec.member_rho[w].resize(n - 1);
                for (auto& q : spec.member_rho[w]) q = rng.next_uniform();
            }
            // pivot_general cross-checks against enumeration internally.
            try {
                pivot_general(spec);
            } catch (const std::logic_error&) {
                worst = 1.0;
            }
        }
        out.push_back(check("pivotEnumerationOracle", worst == 0.0, "50 randomized committees"));
    }
    {
        const double pi = 0.5;
        bool ok = true;
        std::string detail;
        try {
            const double target = 0.9;
            const double beta = calibrate_bonus(pi, sol.value, p, target, st);
            const double back = rho_of_bonus(pi, sol.value, p, beta, st);
            ok = std::abs(back - target) <= 1e-6;
            detail = "rho(beta*) - target = " + num(back - target);
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        out.push_back(check("bonusCalibrationRoundTrip", ok, detail));
    }
    {
        bool ok = true;
        std::string detail = "10 interior points";
        double worst = 0.0;
        for (int i = 1; i <= 10 && ok; ++i) {
            const double pi = 0.1 + 0.08 * i;
            const double beta = 0.1 * (i % 3);
            try {
                const double analytic = rho_prime(pi, sol.value, p, beta, st);
                const double h = 1e-4;
                const double up = rho_of_bonus(pi, sol.value, p, beta + h, st);
                const double dn = rho_of_bonus(pi, sol.value, p, std::max(0.0, beta - h), st);
                const double fd = (up - dn) / (beta - h >= 0.0 ? 2.0 * h : h);
                const double rel = std::abs(analytic - fd) / std::max(1e-12, std::abs(fd));
                worst = std::max(worst, rel);
                ok = rel <= 1e-3;
                if (!ok) detail = "pi " + num(pi) + " rel err " + num(rel);
            } catch (const std::exception& e) {
                ok = false;
                detail = e.what();
            }
        }
        if (ok) detail += ", max rel err " + num(worst);
        out.push_back(check("rhoPrimeVsFiniteDifference", ok, detail));
    }
    {
        bool ok = true;
        std::string detail;
        double worst = 0.0;
        for (double pi : {0.3, 0.5, 0.8}) {
            const CutoffResult c = solve_cutoff(pi, sol.value, p, st);
            const double below = c.cutoff - 0.25;
            const MinimalTransfers mt = minimal_transfers(pi, below, sol.value, p);
            if (mt.beta1_effective && mt.beta1_min > 0.0) {
                worst = std::max(worst, std::abs(bonus_advantage(below, pi, sol.value, p,
                                                                 {mt.beta1_min, 0.0})));
            }
            const double above = c.cutoff + 0.25;
            const MinimalTransfers mt2 = minimal_transfers(pi, above, sol.value, p);
            if (mt2.beta0_effective && mt2.beta0_min > 0.0) {
                worst = std::max(worst, std::abs(bonus_advantage(above, pi, sol.value, p,
                                                                 {0.0, mt2.beta0_min})));
            }
        }
        ok = worst <= 1e-10;
        detail = "max |margin at beta1min| " + num(worst);
        out.push_back(check("minimalTransferIndifference", ok, detail));
    }
    {
        // Leave-one-out canary: corrupting y at t must not move scores at t' <= t.
        CounterRng rng = CounterRng::substream(777, 3);
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            std::vector<PanelRecord> panel;
            const int T = 12;
            for (int t = 0; t < T; ++t) {
                const int a = rng.next_uniform() < 0.6 ? 1 : 0;
                const int y = a == 1 && rng.next_uniform() < 0.5 ? 1 : 0;
                panel.push_back({0, t, a, y, -1.0});
            }
            const auto base = beta_bernoulli_scores(panel, 1.0, 1.0, true);
            const int flip = 4 + static_cast<int>(rng.next_uniform() * 6);
            if (panel[flip].action == 1) {
                panel[flip].outcome = 1 - panel[flip].outcome;
            }
            const auto mod = beta_bernoulli_scores(panel, 1.0, 1.0, true);
            for (int t = 0; t <= flip; ++t) {
                if (base[t] != mod[t]) ok = false;
            }
        }
        out.push_back(check("leaveOneOutCanary", ok, "20 randomized panels"));
    }
    {
        // Binary diagnosticity matches the q_H(1-q_H) <= q_L(1-q_L) inequality.
        CounterRng rng = CounterRng::substream(991, 1);
        bool ok = true;
        for (int trial = 0; trial < 1000 && ok; ++trial) {
            const double ql = 0.5 + 0.49 * rng.next_uniform();
            const double qh = ql + (1.0 - ql - 1e-6) * rng.next_uniform();
            if (!(qh > ql && qh < 1.0)) continue;
            const BinaryJumps j = binary_jumps({qh, ql});
            const bool direct = qh * (1.0 - qh) <= ql * (1.0 - ql);
            const bool via_logs = std::log(j.l_plus) + std::log(j.l_minus) <= 0.0;
            if (j.failure_more_diagnostic != direct) ok = false;
            if (via_logs != direct && std::abs(std::log(j.l_plus * j.l_minus)) > 1e-12) {
                ok = false;
            }
        }
        out.push_back(check("binaryDiagnosticity", ok, "1000 random (qH,qL) draws"));
    }
    return out;
}

std::vector<CheckResult> verify_solution_file(const std::string& csv_path,
                                              const ModelParams& p, const Grid& grid,
                                              const SolveSettings& st) {
    std::vector<CheckResult> out;
    const auto rows = load_equilibrium_csv(csv_path);
    const EquilibriumSolution sol = solve_equilibrium(p, grid, st);
    if (rows.size() != sol.points.size()) {
        out.push_back(check("fileRowCount", false,
                            "file has " + std::to_string(rows.size()) + " rows, solve has " +
                                std::to_string(sol.points.size())));
        return out;
    }
    // 12-significant-digit storage bounds the relative error.
    const auto close = [](double a, double b) {
        return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    struct Col {
        const char* name;
        double EquilibriumRow::* field;
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const auto& pt = sol.points[i];
        if (!close(r.pi, pt.pi)) {
            out.push_back(check("fileGrid", false, "row " + std::to_string(i) + ": pi mismatch"));
            return out;
        }
        // Recompute the branch at the stored cutoff: detects corrupted derived columns.
        const BranchDistribution b = branch_distribution(r.pi, r.s_star, p);
        const std::pair<const char*, std::pair<double, double>> cols[] = {
            {"sStar", {r.s_star, pt.cutoff}},       {"rho", {r.rho, b.r_h}},
            {"piRec1", {r.pi_rec1, b.pi_rec1}},     {"piRec0", {r.pi_rec0, b.pi_rec0}},
            {"effort", {r.effort, b.effort}},       {"pS", {r.p_s, b.success_prob}},
            {"jPlus", {r.j_plus, b.j_plus}},        {"jMinus", {r.j_minus, b.j_minus}},
            {"piPlus", {r.pi_plus, b.pi_plus}},     {"piMinus", {r.pi_minus, b.pi_minus}},
        };
        for (const auto& [nm, pr] : cols) {
            if (!close(pr.first, pr.second)) {
                out.push_back(check(std::string("fileColumn:") + nm, false,
                                    "row " + std::to_string(i) + " (pi=" + num(r.pi) + "): stored " +
                                        num(pr.first) + " vs recomputed " + num(pr.second)));
                return out;
            }
        }
    }
    out.push_back(check("fileCrossCheck", true,
                        std::to_string(rows.size()) + " rows match a fresh solve"));
    return out;
}

bool all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

}  // namespace repdyn
