#pragma once

#include <map>
#include <string>
#include <vector>

#include "repdyn/dynamics.hpp"

namespace repdyn {

struct PanelRecord {
    int expert = 0;
    int t = 0;
    int action = 0;
    int outcome = 0;
    double true_pi = -1.0;  // simulation-known; negative when absent
};

// Leave-one-out Beta-Bernoulli posterior-mean scores, one per panel record,
// in panel order. The score at t uses outcomes from strictly earlier periods
// of the same expert; riskyOnly counts only a = 1 periods.
// Throws on unsorted panels or on records with y != 0 while a = 0.
std::vector<double> beta_bernoulli_scores(const std::vector<PanelRecord>& panel,
                                          double alpha0, double beta0,
                                          bool risky_only = true);

// Per-expert score series of length T+1 (T periods observed); series[t] uses
// periods before t, so the final entry folds in the whole history.
std::map<int, std::vector<double>> beta_bernoulli_series(const std::vector<PanelRecord>& panel,
                                                         double alpha0, double beta0,
                                                         bool risky_only = true);

// One panel record per simulated (replication, period); replications map to
// experts one-to-one.
std::vector<PanelRecord> panel_from_ensemble(const PathEnsemble& ens);

struct RegressionTables {
    // p1: expert,t,repLag,a          -- risk taking on lagged reputation
    // p2: expert,t,repLag,y          -- success conditional on a=1
    // p3: expert,t,repLag,dSuccess,dFailure,failXrep,dRep
    std::vector<std::string> p1_rows;
    std::vector<std::string> p2_rows;
    std::vector<std::string> p3_rows;
    // Sign diagnostics (computed when the ensemble carries truePi).
    double corr_action_rep = 0.0;    // corr(a_t, truePi_t), expected negative
    double corr_success_rep = 0.0;   // corr(y_t, truePi_t | a=1), expected positive
    bool diagnostics_valid = false;
};

// Builds the three regression-ready tables from an ensemble and aligned score
// series (per expert, length T+1). No regression is run.
RegressionTables regression_tables(const PathEnsemble& ens,
                                   const std::map<int, std::vector<double>>& scores);

}  // namespace repdyn
