#include <cmath>

#include "doctest.h"
#include "repdyn/measure.hpp"
#include "test_support.hpp"

using namespace repdyn;

TEST_CASE("beta-bernoulli scores: prior mean and the worked history") {
    std::vector<PanelRecord> panel = {
        {0, 0, 1, 1, -1}, {0, 1, 1, 1, -1}, {0, 2, 1, 0, -1}, {0, 3, 1, 1, -1}};
    const auto scores = beta_bernoulli_scores(panel, 1.0, 1.0, true);
    REQUIRE(scores.size() == 4);
    CHECK(scores[0] == doctest::Approx(0.5));             // empty history
    CHECK(scores[3] == doctest::Approx(0.6).epsilon(1e-15));  // (1+2)/(2+3)
}

TEST_CASE("scores use strictly prior periods only") {
    std::vector<PanelRecord> panel;
    for (int t = 0; t < 8; ++t) {
        panel.push_back({3, t, 1, t % 2, -1});
    }
    const auto base = beta_bernoulli_scores(panel, 1.0, 1.0, true);
    // corrupting y at t = 5 must leave scores at t <= 5 untouched
    auto corrupted = panel;
    corrupted[5].outcome = 1 - corrupted[5].outcome;
    const auto mod = beta_bernoulli_scores(corrupted, 1.0, 1.0, true);
    for (int t = 0; t <= 5; ++t) CHECK(base[t] == mod[t]);
    CHECK(base[6] != mod[6]);
}

TEST_CASE("risky-only counting skips safe periods") {
    std::vector<PanelRecord> panel = {
        {0, 0, 1, 1, -1}, {0, 1, 0, 0, -1}, {0, 2, 1, 1, -1}, {0, 3, 0, 0, -1},
        {0, 4, 1, 0, -1}};
    const auto risky = beta_bernoulli_scores(panel, 1.0, 1.0, true);
    CHECK(risky[4] == doctest::Approx((1.0 + 2.0) / (2.0 + 2.0)));
    const auto all = beta_bernoulli_scores(panel, 1.0, 1.0, false);
    CHECK(all[4] == doctest::Approx((1.0 + 2.0) / (2.0 + 4.0)));
}

TEST_CASE("appending a success weakly raises later scores") {
    std::vector<PanelRecord> panel;
    for (int t = 0; t < 6; ++t) panel.push_back({0, t, 1, t % 3 == 0 ? 1 : 0, -1});
    const auto base = beta_bernoulli_scores(panel, 2.0, 2.0, true);
    std::vector<PanelRecord> boosted = {{0, -1, 1, 1, -1}};
    for (const auto& r : panel) boosted.push_back(r);
    const auto up = beta_bernoulli_scores(boosted, 2.0, 2.0, true);
    for (std::size_t t = 0; t < base.size(); ++t) {
        CHECK(up[t + 1] >= base[t]);
    }
}

TEST_CASE("panel validation errors") {
    std::vector<PanelRecord> unsorted = {{0, 1, 1, 0, -1}, {0, 0, 1, 1, -1}};
    CHECK_THROWS_AS(beta_bernoulli_scores(unsorted, 1, 1, true), std::invalid_argument);
    std::vector<PanelRecord> bad_y = {{0, 0, 0, 1, -1}};
    CHECK_THROWS_AS(beta_bernoulli_scores(bad_y, 1, 1, true), std::invalid_argument);
    std::vector<PanelRecord> fine = {{0, 0, 1, 1, -1}};
    CHECK_THROWS_AS(beta_bernoulli_scores(fine, 0.0, 1.0, true), std::invalid_argument);
}

namespace {

PathEnsemble tiny_ensemble() {
    PathEnsemble ens;
    ens.settings.replications = 1;
    ens.settings.horizon = 3;
    // t=0 risky success, t=1 safe, t=2 risky failure
    ens.replications = {{
        {0.5, 1, 1.2, 1, 1, 0.6},
        {0.6, 0, -0.5, 0, 0, 0.6},
        {0.6, 0, 0.9, 1, 0, 0.45},
    }};
    return ens;
}

}  // namespace

TEST_CASE("regression tables: row counts on a tiny ensemble") {
    const PathEnsemble ens = tiny_ensemble();
    const auto series = beta_bernoulli_series(panel_from_ensemble(ens), 1.0, 1.0, true);
    REQUIRE(series.at(0).size() == 4);  // T + 1 scores

    const RegressionTables tab = regression_tables(ens, series);
    CHECK(tab.p1_rows.size() == 2);  // t = 1, 2 carry a defined lag
    CHECK(tab.p2_rows.size() == 1);  // only t = 2 is risky among t >= 1
    CHECK(tab.p3_rows.size() == 1);
    // dRep for the risky failure at t=2: score moves from 2/3 to (1+1)/(2+2)
    const std::string& row = tab.p3_rows[0];
    CHECK(row.find("0,2,") == 0);
    // repLag 2/3, dSuccess 0, dFailure 1, failXrep 2/3, dRep 0.5 - 2/3
    CHECK(row.find(",0,1,") != std::string::npos);
    CHECK(row.find("-0.16666666666") != std::string::npos);
}

TEST_CASE("regression tables: empty risky set leaves p2 header-only") {
    PathEnsemble ens;
    ens.settings.replications = 1;
    ens.settings.horizon = 3;
    ens.replications = {{
        {0.5, 0, -1.0, 0, 0, 0.5},
        {0.5, 1, -0.2, 0, 0, 0.5},
        {0.5, 0, -0.7, 0, 0, 0.5},
    }};
    const auto series = beta_bernoulli_series(panel_from_ensemble(ens), 1.0, 1.0, true);
    const RegressionTables tab = regression_tables(ens, series);
    CHECK(tab.p2_rows.empty());
    CHECK(tab.p3_rows.empty());
    CHECK(tab.p1_rows.size() == 2);
}

TEST_CASE("regression tables: misaligned scores are rejected with the offender") {
    const PathEnsemble ens = tiny_ensemble();
    std::map<int, std::vector<double>> missing;
    CHECK_THROWS_WITH_AS(regression_tables(ens, missing), doctest::Contains("expert 0"),
                         std::invalid_argument);
    std::map<int, std::vector<double>> short_series{{0, {0.5, 0.5}}};
    CHECK_THROWS_WITH_AS(regression_tables(ens, short_series), doctest::Contains("expected 4"),
                         std::invalid_argument);
}

TEST_CASE("sign diagnostics on a theta-mixed simulated panel") {
    const EquilibriumSolution& sol = repdyn::testing::baseline_solution();
    SimSettings sim;
    sim.seed = 210;
    sim.replications = 120;
    sim.horizon = 150;
    sim.true_type = ExpertType::High;
    PathEnsemble merged = simulate_paths(sol, sim, 4);
    sim.true_type = ExpertType::Low;
    sim.seed = 211;
    const PathEnsemble low = simulate_paths(sol, sim, 4);
    merged.replications.insert(merged.replications.end(), low.replications.begin(),
                               low.replications.end());

    const auto series = beta_bernoulli_series(panel_from_ensemble(merged), 1.0, 1.0, true);
    const RegressionTables tab = regression_tables(merged, series);
    REQUIRE(tab.diagnostics_valid);
    // P1: risk taking falls with reputation; P2: success rises with it.
    CHECK(tab.corr_action_rep < 0.0);
    CHECK(tab.corr_success_rep > 0.0);
}
