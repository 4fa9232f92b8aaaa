#include <cmath>

#include "doctest.h"
#include "repdyn/solver.hpp"
#include "test_support.hpp"

using namespace repdyn;

TEST_CASE("grid construction") {
    const Grid g = Grid::uniform();
    CHECK(g.size() == 321);
    CHECK(g.points.front() == doctest::Approx(0.05));
    CHECK(g.points.back() == doctest::Approx(0.95));
    CHECK_THROWS_AS(Grid::uniform(10, 0.0, 0.9), std::invalid_argument);
}

TEST_CASE("value function interpolation and extension") {
    Grid g;
    g.points = {0.2, 0.4, 0.6};
    ValueFunction v{g, {1.0, 2.0, 4.0}, 0.0, 0.0};
    CHECK(v(0.3) == doctest::Approx(1.5));
    CHECK(v(0.5) == doctest::Approx(3.0));
    CHECK(v(0.1) == doctest::Approx(1.0));  // clamped by default
    CHECK(v(0.9) == doctest::Approx(4.0));
    v.ext_slope_lo = 5.0;
    v.ext_slope_hi = 10.0;
    CHECK(v(0.1) == doctest::Approx(1.0 - 0.1 * 5.0));
    CHECK(v(0.7) == doctest::Approx(4.0 + 0.1 * 10.0));
}

TEST_CASE("margin vanishes for a constant value function") {
    ModelParams p;
    const Grid g = Grid::uniform(41, 0.05, 0.95);
    const ValueFunction v = ValueFunction::constant(g, 3.7);
    for (double s : {-2.0, 0.0, 0.8, 2.5}) {
        CHECK(std::abs(risky_advantage(s, 0.5, v, p)) <= 1e-13);
    }
    ModelParams fee = p;
    fee.phi = 0.2;
    for (double s : {-2.0, 0.8}) {
        CHECK(risky_advantage(s, 0.5, v, fee) == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("solve_cutoff clamps under flat margins") {
    ModelParams p;
    const Grid g = Grid::uniform(41, 0.05, 0.95);
    const ValueFunction v = ValueFunction::constant(g, 1.0);
    const SolveSettings st;

    ModelParams fee = p;
    fee.phi = 0.1;
    const CutoffResult always = solve_cutoff(0.5, v, fee, st);
    CHECK(always.clamped_low);
    CHECK(always.cutoff == doctest::Approx(st.bracket_lo(fee)));
    CHECK_FALSE(always.tie_zero);

    const CutoffResult tie = solve_cutoff(0.5, v, p, st);
    CHECK(tie.clamped_low);
    CHECK(tie.tie_zero);
}

TEST_CASE("non-finite margins surface as solver errors naming the belief") {
    ModelParams p;
    const Grid g = Grid::uniform(41, 0.05, 0.95);
    ValueFunction v = ValueFunction::constant(g, 1.0);
    v.values[20] = std::numeric_limits<double>::quiet_NaN();
    const SolveSettings st;
    CHECK_THROWS_WITH_AS(solve_cutoff(0.5, v, p, st),
                         doctest::Contains("pi=0.5"), SolveError);
}

TEST_CASE("myopic model solves exactly") {
    ModelParams p;
    p.delta = 0.0;
    const Grid g = Grid::uniform(81, 0.05, 0.95);
    const EquilibriumSolution sol = solve_equilibrium(p, g, SolveSettings{});
    for (const auto& pt : sol.points) {
        CHECK(sol.value(pt.pi) == doctest::Approx(pt.pi * pt.pi).epsilon(1e-15));
    }
    CHECK(sol.value(0.5) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("symmetric types reproduce the no-learning closed form") {
    const ModelParams p = testing::symmetric_params();
    const Grid g = Grid::uniform();
    const EquilibriumSolution sol = solve_equilibrium(p, g, SolveSettings{});
    double worst = 0.0;
    for (const auto& pt : sol.points) {
        const double closed = pt.pi * pt.pi / (1.0 - p.delta);
        worst = std::max(worst, std::abs(sol.value(pt.pi) - closed));
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("baseline equilibrium: convergence, conservatism, monotone value") {
    const EquilibriumSolution& sol = testing::baseline_solution();
    CHECK(sol.sup_norm_residual < 1e-6);
    CHECK(sol.iterations < sol.settings.max_iterations);
    CHECK(sol.points.size() == 321);

    for (std::size_t j = 1; j < sol.value.values.size(); ++j) {
        CHECK(sol.value.values[j] >= sol.value.values[j - 1] - 1e-8);
    }
    int s_viol = 0, rho_viol = 0;
    for (std::size_t j = 0; j + 1 < sol.points.size(); ++j) {
        if (sol.points[j].clamped() || sol.points[j + 1].clamped()) continue;
        if (sol.points[j + 1].cutoff < sol.points[j].cutoff - 1e-9) ++s_viol;
        if (sol.points[j + 1].rho > sol.points[j].rho + 1e-9) ++rho_viol;
    }
    CHECK(s_viol == 0);
    CHECK(rho_viol == 0);

    // The recorded cutoffs zero the margin.
    for (std::size_t j = 0; j < sol.points.size(); j += 16) {
        const auto& pt = sol.points[j];
        if (pt.clamped()) continue;
        CHECK(std::abs(risky_advantage(pt.cutoff, pt.pi, sol.value, sol.params)) <= 1e-10);
    }
}

TEST_CASE("dense scan: single crossing and agreement with solve_cutoff") {
    const EquilibriumSolution& sol = testing::baseline_solution();
    const ModelParams& p = sol.params;
    const SolveSettings& st = sol.settings;
    const double lo = st.bracket_lo(p), hi = st.bracket_hi(p);

    for (double pi : {0.1, 0.5, 0.9}) {
        const double band = 1e-9;
        int crossings = 0;
        double root_lo = lo, root_hi = hi;
        bool have = false, seen_positive = false;
        double last_strict = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const double s = lo + (hi - lo) * i / 1999.0;
            const double d = risky_advantage(s, pi, sol.value, p);
            if (std::abs(d) <= band) continue;
            if (have && (d > 0.0) != (last_strict > 0.0)) {
                ++crossings;
                root_hi = s;
                root_lo = s - (hi - lo) / 1999.0;
            }
            // once strictly positive, the margin never dips strictly negative again
            if (d > 0.0) seen_positive = true;
            if (seen_positive) CHECK(d > -band);
            last_strict = d;
            have = true;
        }
        CHECK(crossings == 1);

        // refine the scan bracket independently and compare with solve_cutoff
        double a = root_lo, b = root_hi;
        double fa = risky_advantage(a, pi, sol.value, p);
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = risky_advantage(m, pi, sol.value, p);
            if ((fm >= 0.0) == (fa >= 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        const double oracle_root = 0.5 * (a + b);
        const CutoffResult c = solve_cutoff(pi, sol.value, p, st);
        CHECK_FALSE(c.clamped());
        CHECK(std::abs(c.cutoff - oracle_root) <= 1e-9);
    }
}

TEST_CASE("always-risky clamp drives the experimentation rate to one") {
    ModelParams p;
    p.delta = 0.0;
    p.phi = 0.5;  // margin is phi everywhere, so every point clamps risky
    const EquilibriumSolution sol =
        solve_equilibrium(p, Grid::uniform(41, 0.05, 0.95), SolveSettings{});
    for (const auto& pt : sol.points) {
        CHECK(pt.clamped_low);
        CHECK(pt.rho >= 1.0 - 1e-6);
    }
}

TEST_CASE("experimentation rate mirrors the policy table") {
    const EquilibriumSolution& sol = testing::baseline_solution();
    const auto rate = experimentation_rate(sol);
    REQUIRE(rate.size() == sol.points.size());
    for (std::size_t j = 0; j < rate.size(); ++j) {
        CHECK(rate[j].first == sol.points[j].pi);
        CHECK(rate[j].second == sol.points[j].rho);
        CHECK(rate[j].second >= 0.0);
        CHECK(rate[j].second <= 1.0);
    }
}

TEST_CASE("fixed-policy Bellman sweep is a delta-contraction") {
    const EquilibriumSolution& sol = testing::baseline_solution();
    const ModelParams& p = sol.params;
    const auto& grid = sol.value.grid.points;

    std::vector<double> cutoffs(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        cutoffs[j] = testing::interp_cutoff(sol, grid[j]);
    }
    ValueFunction v1 = sol.value;
    ValueFunction v2 = sol.value;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        v2.values[j] += 0.4 + 0.3 * std::cos(11.0 * grid[j]);
    }
    const auto t1 = bellman_apply(v1, cutoffs, p);
    const auto t2 = bellman_apply(v2, cutoffs, p);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        lhs = std::max(lhs, std::abs(t1[j] - t2[j]));
        rhs = std::max(rhs, std::abs(v1.values[j] - v2.values[j]));
    }
    CHECK(lhs <= p.delta * rhs + 1e-12);
}

TEST_CASE("solves are deterministic") {
    ModelParams p;
    const Grid g = Grid::uniform(81, 0.05, 0.95);
    const SolveSettings st;
    const EquilibriumSolution a = solve_equilibrium(p, g, st);
    const EquilibriumSolution b = solve_equilibrium(p, g, st);
    CHECK(a.content_hash() == b.content_hash());
    for (std::size_t j = 0; j < a.points.size(); ++j) {
        CHECK(a.points[j].cutoff == b.points[j].cutoff);
        CHECK(a.points[j].rho == b.points[j].rho);
    }
}

TEST_CASE("non-convergence carries the residual history") {
    ModelParams p;
    SolveSettings st;
    st.max_iterations = 3;
    try {
        solve_equilibrium(p, Grid::uniform(41, 0.05, 0.95), st);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.residual_history.size() == 3);
        CHECK(e.residual_history.front() > 0.0);
    }
}

TEST_CASE("lambda sweep moves the cutoff down pointwise") {
    ModelParams p;
    const SweepReport rep = comparative_sweep(p, SweepAxis::Lambda, {0.5, 0.6},
                                              Grid::uniform(), SolveSettings{});
    REQUIRE(rep.steps.size() == 1);
    CHECK(rep.steps[0].expected_sign == -1);
    CHECK(rep.steps[0].violations == 0);
    CHECK(rep.steps[0].compared_points > 300);
}

TEST_CASE("sweep report mechanics") {
    ModelParams p;
    CHECK_THROWS_AS(
        comparative_sweep(p, SweepAxis::Delta, {0.9}, Grid::uniform(41, 0.05, 0.95),
                          SolveSettings{}),
        std::invalid_argument);
    const SweepReport rep = comparative_sweep(p, SweepAxis::Delta, {0.95, 0.90},
                                              Grid::uniform(41, 0.05, 0.95), SolveSettings{});
    // descending sweep: expected move flips sign
    CHECK(rep.steps[0].expected_sign == -1);
    CHECK(rep.cutoffs.size() == 2);
    CHECK(static_cast<int>(rep.steps[0].violating_pis.size()) == rep.steps[0].violations);
}

TEST_CASE("diagnosticity report") {
    const EquilibriumSolution& sol = testing::baseline_solution();
    const auto rows = diagnosticity_at_cutoff(sol);
    REQUIRE(rows.size() == sol.points.size());
    for (const auto& r : rows) {
        CHECK(r.holds == (r.slack <= 0.0));
    }

    const ModelParams sym = testing::symmetric_params();
    const EquilibriumSolution ssol =
        solve_equilibrium(sym, Grid::uniform(41, 0.05, 0.95), SolveSettings{});
    for (const auto& r : diagnosticity_at_cutoff(ssol)) {
        CHECK(std::abs(r.slack) <= 1e-12);
    }
}
