#include "repdyn/measure.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace repdyn {

namespace {

void check_panel(const std::vector<PanelRecord>& panel) {
    std::map<int, int> last_t;
    for (const auto& r : panel) {
        if (r.action == 0 && r.outcome != 0) {
            throw std::invalid_argument("panel: outcome must be 0 when action is 0 (expert " +
                                        std::to_string(r.expert) + ", t " +
                                        std::to_string(r.t) + ")");
        }
        auto it = last_t.find(r.expert);
        if (it != last_t.end() && r.t <= it->second) {
            throw std::invalid_argument("panel: periods must be strictly increasing per expert (expert " +
                                        std::to_string(r.expert) + ", t " +
                                        std::to_string(r.t) + ")");
        }
        last_t[r.expert] = r.t;
    }
}

void check_priors(double alpha0, double beta0) {
    if (!(alpha0 > 0.0 && beta0 > 0.0)) {
        throw std::invalid_argument("beta_bernoulli: priors must be positive");
    }
}

}  // namespace

std::vector<double> beta_bernoulli_scores(const std::vector<PanelRecord>& panel,
                                          double alpha0, double beta0, bool risky_only) {
    check_priors(alpha0, beta0);
    check_panel(panel);
    std::map<int, std::pair<double, double>> counts;  // expert -> (S, N)
    std::vector<double> out;
    out.reserve(panel.size());
    for (const auto& r : panel) {
        auto& [s, n] = counts[r.expert];
        out.push_back((alpha0 + s) / (alpha0 + beta0 + n));
        if (!risky_only || r.action == 1) {
            s += r.outcome;
            n += 1.0;
        }
    }
    return out;
}

std::map<int, std::vector<double>> beta_bernoulli_series(const std::vector<PanelRecord>& panel,
                                                         double alpha0, double beta0,
                                                         bool risky_only) {
    check_priors(alpha0, beta0);
    check_panel(panel);
    std::map<int, std::vector<double>> series;
    std::map<int, std::pair<double, double>> counts;
    for (const auto& r : panel) {
        auto& [s, n] = counts[r.expert];
        series[r.expert].push_back((alpha0 + s) / (alpha0 + beta0 + n));
        if (!risky_only || r.action == 1) {
            s += r.outcome;
            n += 1.0;
        }
    }
    for (auto& [expert, vec] : series) {
        const auto& [s, n] = counts[expert];
        vec.push_back((alpha0 + s) / (alpha0 + beta0 + n));
    }
    return series;
}

std::vector<PanelRecord> panel_from_ensemble(const PathEnsemble& ens) {
    std::vector<PanelRecord> panel;
    for (std::size_t rep = 0; rep < ens.replications.size(); ++rep) {
        const auto& path = ens.replications[rep];
        for (std::size_t t = 0; t < path.size(); ++t) {
            panel.push_back({static_cast<int>(rep), static_cast<int>(t), path[t].action,
                             path[t].outcome, path[t].pi});
        }
    }
    return panel;
}

namespace {

std::string row(std::initializer_list<double> vals) {
    std::string out;
    char buf[64];
    bool first = true;
    for (double v : vals) {
        if (!first) out += ',';
        first = false;
        if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
            std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        } else {
            std::snprintf(buf, sizeof buf, "%.12g", v);
        }
        out += buf;
    }
    return out;
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

RegressionTables regression_tables(const PathEnsemble& ens,
                                   const std::map<int, std::vector<double>>& scores) {
    RegressionTables tab;
    std::vector<double> a_vals, rep_vals_a, y_vals, rep_vals_y;

    for (std::size_t rep = 0; rep < ens.replications.size(); ++rep) {
        const int expert = static_cast<int>(rep);
        const auto& path = ens.replications[rep];
        const auto it = scores.find(expert);
        if (it == scores.end()) {
            throw std::invalid_argument("regression_tables: no scores for expert " +
                                        std::to_string(expert));
        }
        const auto& sc = it->second;
        if (sc.size() != path.size() + 1) {
            throw std::invalid_argument("regression_tables: score series for expert " +
                                        std::to_string(expert) + " has " +
                                        std::to_string(sc.size()) + " entries, expected " +
                                        std::to_string(path.size() + 1));
        }
        for (std::size_t t = 1; t < path.size(); ++t) {
            const double rep_lag = sc[t];  // uses outcomes before t
            const auto& step = path[t];
            tab.p1_rows.push_back(row({static_cast<double>(expert), static_cast<double>(t),
                                       rep_lag, static_cast<double>(step.action)}));
            if (step.pi >= 0.0) {
                a_vals.push_back(step.action);
                rep_vals_a.push_back(step.pi);
            }
            if (step.action == 1) {
                tab.p2_rows.push_back(row({static_cast<double>(expert),
                                           static_cast<double>(t), rep_lag,
                                           static_cast<double>(step.outcome)}));
                if (step.pi >= 0.0) {
                    y_vals.push_back(step.outcome);
                    rep_vals_y.push_back(step.pi);
                }
                const double d_success = step.outcome == 1 ? 1.0 : 0.0;
                const double d_failure = 1.0 - d_success;
                tab.p3_rows.push_back(row({static_cast<double>(expert),
                                           static_cast<double>(t), rep_lag, d_success,
                                           d_failure, d_failure * rep_lag,
                                           sc[t + 1] - sc[t]}));
            }
        }
    }
    if (!a_vals.empty()) {
        tab.corr_action_rep = correlation(a_vals, rep_vals_a);
        tab.corr_success_rep = correlation(y_vals, rep_vals_y);
        tab.diagnostics_valid = true;
    }
    return tab;
}

}  // namespace repdyn
