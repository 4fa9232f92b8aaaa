#include "repdyn/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "repdyn/io.hpp"
#include "repdyn/verify.hpp"

namespace repdyn {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
    throw std::invalid_argument("config error at " + path + ": " + msg);
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
    if (!obj.is_object()) config_error(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!required.count(key) && !optional.count(key)) {
            config_error(path + "." + key, "unknown key");
        }
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) config_error(path + "." + key, "missing required key");
    }
}

double get_num(const json& obj, const std::string& path, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) config_error(path + "." + key, "expected a number");
    return v.get<double>();
}

ModelParams parse_model(const json& j) {
    require_keys(j, "model",
                 {"mu0", "mu1", "sigmaH", "sigmaL", "lambda", "delta", "phi", "deltaL"},
                 {"safeUpdate", "lowType"});
    ModelParams p;
    p.mu0 = get_num(j, "model", "mu0");
    p.mu1 = get_num(j, "model", "mu1");
    p.sigma_h = get_num(j, "model", "sigmaH");
    p.sigma_l = get_num(j, "model", "sigmaL");
    p.lambda = get_num(j, "model", "lambda");
    p.delta = get_num(j, "model", "delta");
    p.phi = get_num(j, "model", "phi");
    p.delta_l = get_num(j, "model", "deltaL");
    if (j.contains("safeUpdate")) {
        const std::string s = j.at("safeUpdate").get<std::string>();
        if (s == "recOnly") p.safe_update = SafeUpdate::RecOnly;
        else if (s == "freeze") p.safe_update = SafeUpdate::Freeze;
        else config_error("model.safeUpdate", "expected recOnly or freeze");
    }
    if (j.contains("lowType")) {
        const std::string s = j.at("lowType").get<std::string>();
        if (s == "matchFrequency") p.low_type = LowTypeBehavior::MatchFrequency;
        else if (s == "cutoffOffset") p.low_type = LowTypeBehavior::CutoffOffset;
        else config_error("model.lowType", "expected matchFrequency or cutoffOffset");
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        config_error("model", e.what());
    }
    return p;
}

void parse_solve(const json& j, SolveSettings& st, Grid& grid) {
    require_keys(j, "solve", {},
                 {"damping", "tolerance", "maxIterations", "bisectionIterations",
                  "gridPoints", "gridLow", "gridHigh", "paddingCells"});
    if (j.contains("damping")) st.damping = get_num(j, "solve", "damping");
    if (j.contains("tolerance")) st.tolerance = get_num(j, "solve", "tolerance");
    if (j.contains("maxIterations"))
        st.max_iterations = static_cast<int>(get_num(j, "solve", "maxIterations"));
    if (j.contains("bisectionIterations"))
        st.bisection_iterations = static_cast<int>(get_num(j, "solve", "bisectionIterations"));
    if (j.contains("paddingCells"))
        st.padding_cells = static_cast<int>(get_num(j, "solve", "paddingCells"));
    int points = static_cast<int>(grid.size());
    double lo = grid.points.front(), hi = grid.points.back();
    if (j.contains("gridPoints")) points = static_cast<int>(get_num(j, "solve", "gridPoints"));
    if (j.contains("gridLow")) lo = get_num(j, "solve", "gridLow");
    if (j.contains("gridHigh")) hi = get_num(j, "solve", "gridHigh");
    try {
        st.validate();
        grid = Grid::uniform(points, lo, hi);
    } catch (const std::invalid_argument& e) {
        config_error("solve", e.what());
    }
}

SimConfig parse_sim(const json& j) {
    require_keys(j, "sim", {}, {"pi0", "horizon", "replications", "trueType"});
    SimConfig sim;
    if (j.contains("pi0")) sim.settings.pi0 = get_num(j, "sim", "pi0");
    if (j.contains("horizon"))
        sim.settings.horizon = static_cast<int>(get_num(j, "sim", "horizon"));
    if (j.contains("replications"))
        sim.settings.replications = static_cast<int>(get_num(j, "sim", "replications"));
    if (j.contains("trueType")) {
        const std::string s = j.at("trueType").get<std::string>();
        if (s == "H") sim.type = SimType::High;
        else if (s == "L") sim.type = SimType::Low;
        else if (s == "both") sim.type = SimType::Both;
        else config_error("sim.trueType", "expected H, L, or both");
    }
    try {
        sim.settings.validate();
    } catch (const std::invalid_argument& e) {
        config_error("sim", e.what());
    }
    return sim;
}

SweepConfig parse_sweep(const json& j) {
    require_keys(j, "sweep", {"axis", "values"}, {});
    SweepConfig sw;
    const std::string axis = j.at("axis").get<std::string>();
    if (axis == "sigmaH") sw.axis = SweepAxis::SigmaH;
    else if (axis == "lambda") sw.axis = SweepAxis::Lambda;
    else if (axis == "delta") sw.axis = SweepAxis::Delta;
    else config_error("sweep.axis", "expected sigmaH, lambda, or delta");
    for (const auto& v : j.at("values")) sw.values.push_back(v.get<double>());
    if (sw.values.size() < 2) config_error("sweep.values", "need at least 2 values");
    return sw;
}

BonusConfig parse_bonus(const json& j) {
    require_keys(j, "bonus", {"pis", "beta1Values"}, {"beta0", "rhoTarget"});
    BonusConfig b;
    for (const auto& v : j.at("pis")) b.pis.push_back(v.get<double>());
    for (const auto& v : j.at("beta1Values")) b.beta1_values.push_back(v.get<double>());
    if (j.contains("beta0")) b.beta0 = get_num(j, "bonus", "beta0");
    if (j.contains("rhoTarget")) b.rho_target = get_num(j, "bonus", "rhoTarget");
    if (b.pis.empty()) config_error("bonus.pis", "need at least one belief");
    if (b.beta1_values.empty()) config_error("bonus.beta1Values", "need at least one value");
    return b;
}

CommitteeSpec parse_committee(const json& j) {
    require_keys(j, "committee", {"n", "lambda"},
                 {"k", "kValues", "influence", "rho0", "rho1", "memberRho0", "memberRho1"});
    CommitteeSpec spec;
    spec.n = static_cast<int>(get_num(j, "committee", "n"));
    spec.lambda = get_num(j, "committee", "lambda");
    if (j.contains("influence")) {
        for (const auto& v : j.at("influence")) spec.influence.push_back(v.get<int>());
        spec.threshold_k = 0;
    } else if (j.contains("k")) {
        spec.threshold_k = static_cast<int>(get_num(j, "committee", "k"));
    } else if (j.contains("kValues")) {
        spec.threshold_k = 1;  // placeholder; the command substitutes each kValue
    } else {
        config_error("committee", "need one of k, kValues, or influence");
    }
    if (j.contains("memberRho0") || j.contains("memberRho1")) {
        if (!j.contains("memberRho0") || !j.contains("memberRho1")) {
            config_error("committee", "memberRho0 and memberRho1 must appear together");
        }
        spec.shared = false;
        for (const auto& v : j.at("memberRho0")) spec.member_rho[0].push_back(v.get<double>());
        for (const auto& v : j.at("memberRho1")) spec.member_rho[1].push_back(v.get<double>());
    } else {
        spec.shared = true;
        spec.shared_rho[0] = j.contains("rho0") ? get_num(j, "committee", "rho0") : 0.5;
        spec.shared_rho[1] = j.contains("rho1") ? get_num(j, "committee", "rho1") : 0.5;
    }
    return spec;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config error: invalid JSON: ") + e.what());
    }
    require_keys(j, "$", {"model"},
                 {"solve", "sim", "sweep", "bonus", "committee", "boundaries", "measure",
                  "verify", "outputDir", "seed"});
    RunConfig cfg;
    cfg.model = parse_model(j.at("model"));
    if (j.contains("solve")) parse_solve(j.at("solve"), cfg.solve, cfg.grid);
    if (j.contains("sim")) cfg.sim = parse_sim(j.at("sim"));
    if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"));
    if (j.contains("bonus")) cfg.bonus = parse_bonus(j.at("bonus"));
    if (j.contains("committee")) {
        cfg.committee = parse_committee(j.at("committee"));
        if (j.at("committee").contains("kValues")) {
            for (const auto& v : j.at("committee").at("kValues")) {
                cfg.committee_k_values.push_back(v.get<int>());
            }
            if (cfg.committee_k_values.empty()) {
                config_error("committee.kValues", "need at least one threshold");
            }
        }
    }
    if (j.contains("boundaries")) {
        require_keys(j.at("boundaries"), "boundaries", {"piLow", "piHigh"}, {});
        BoundariesConfig bc;
        bc.pi_low = get_num(j.at("boundaries"), "boundaries", "piLow");
        bc.pi_high = get_num(j.at("boundaries"), "boundaries", "piHigh");
        cfg.boundaries = bc;
    }
    if (j.contains("measure")) {
        require_keys(j.at("measure"), "measure", {}, {"alpha0", "beta0", "riskyOnly"});
        const auto& m = j.at("measure");
        if (m.contains("alpha0")) cfg.measure.alpha0 = get_num(m, "measure", "alpha0");
        if (m.contains("beta0")) cfg.measure.beta0 = get_num(m, "measure", "beta0");
        if (m.contains("riskyOnly")) cfg.measure.risky_only = m.at("riskyOnly").get<bool>();
    }
    if (j.contains("verify")) {
        require_keys(j.at("verify"), "verify", {}, {"solutionFile"});
        if (j.at("verify").contains("solutionFile")) {
            cfg.verify.solution_file = j.at("verify").at("solutionFile").get<std::string>();
        }
    }
    if (j.contains("outputDir")) cfg.output_dir = j.at("outputDir").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

    // committee kValues: stored separately on the spec via a side channel below.
    cfg.resolved_json = j.dump(2);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config error: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_sidecar(const std::string& artifact_path, const std::string& command,
                   const RunConfig& cfg, std::uint64_t solution_hash,
                   const std::vector<CheckResult>& checks) {
    json meta;
    meta["command"] = command;
    meta["resolvedConfig"] = json::parse(cfg.resolved_json);
    meta["resolvedConfig"]["seed"] = cfg.seed;
    meta["resolvedConfig"]["outputDir"] = cfg.output_dir;
    meta["solutionHash"] = hash_hex(solution_hash);
    meta["validated"] = all_pass(checks);
    json names = json::array();
    for (const auto& c : checks) {
        names.push_back(json{{"name", c.name}, {"pass", c.pass}});
    }
    meta["checks"] = names;
    write_text_file(artifact_path + ".meta.json", meta.dump(2) + "\n");
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

json ensemble_json(const PathEnsemble& ens) {
    json arr = json::array();
    for (std::size_t rep = 0; rep < ens.replications.size(); ++rep) {
        for (std::size_t t = 0; t < ens.replications[rep].size(); ++t) {
            const auto& s = ens.replications[rep][t];
            arr.push_back(json{{"rep", rep},
                               {"t", t},
                               {"pi", s.pi},
                               {"omega", s.omega},
                               {"s", s.signal},
                               {"a", s.action},
                               {"y", s.outcome},
                               {"piNext", s.pi_next}});
        }
    }
    return arr;
}

int cmd_solve(const RunConfig& cfg, const CliOptions& opt) {
    const EquilibriumSolution sol = solve_equilibrium(cfg.model, cfg.grid, cfg.solve);
    const auto checks = verify_solution(sol);
    std::string path;
    if (opt.format == "json") {
        json rows = json::array();
        for (const auto& pt : sol.points) {
            rows.push_back(json{{"pi", pt.pi},
                                {"sStar", pt.cutoff},
                                {"rho", pt.rho},
                                {"piRec1", pt.branch.pi_rec1},
                                {"piRec0", pt.branch.pi_rec0},
                                {"effort", pt.branch.effort},
                                {"pS", pt.branch.success_prob},
                                {"jPlus", pt.branch.j_plus},
                                {"jMinus", pt.branch.j_minus},
                                {"piPlus", pt.branch.pi_plus},
                                {"piMinus", pt.branch.pi_minus},
                                {"clamped", pt.clamped_low ? 1 : (pt.clamped_high ? 2 : 0)}});
        }
        path = out_path(cfg, "equilibrium.json");
        write_text_file(path, rows.dump(2) + "\n");
    } else {
        path = out_path(cfg, "equilibrium.csv");
        write_text_file(path, equilibrium_csv(sol));
    }
    write_sidecar(path, "solve", cfg, sol.content_hash(), checks);
    std::printf("solve: %zu grid points, %d sweeps, residual %s -> %s\n", sol.points.size(),
                sol.iterations, format_sig12(sol.sup_norm_residual).c_str(), path.c_str());
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const CliOptions& opt) {
    const EquilibriumSolution sol = solve_equilibrium(cfg.model, cfg.grid, cfg.solve);
    const auto checks = verify_solution(sol);
    SimConfig sim = cfg.sim.value_or(SimConfig{});
    sim.settings.seed = cfg.seed;

    struct Leg {
        ExpertType type;
        const char* name_csv;
        const char* name_json;
    };
    std::vector<Leg> legs;
    if (sim.type == SimType::Both) {
        legs.push_back({ExpertType::High, "paths_H.csv", "paths_H.json"});
        legs.push_back({ExpertType::Low, "paths_L.csv", "paths_L.json"});
    } else {
        legs.push_back({sim.type == SimType::High ? ExpertType::High : ExpertType::Low,
                        "paths.csv", "paths.json"});
    }
    for (const auto& leg : legs) {
        SimSettings settings = sim.settings;
        settings.true_type = leg.type;
        const PathEnsemble ens = simulate_paths(sol, settings, opt.threads);
        std::string path;
        if (opt.format == "json") {
            path = out_path(cfg, leg.name_json);
            write_text_file(path, ensemble_json(ens).dump() + "\n");
        } else {
            path = out_path(cfg, leg.name_csv);
            write_text_file(path, paths_csv(ens));
        }
        write_sidecar(path, "simulate", cfg, ens.solution_hash, checks);
        std::printf("simulate(%s): %d replications x %d periods, %d clamp events -> %s\n",
                    leg.type == ExpertType::High ? "H" : "L", settings.replications,
                    settings.horizon, ens.clamp_events, path.c_str());
    }
    return kExitOk;
}

int cmd_statics(const RunConfig& cfg, const CliOptions&) {
    if (!cfg.sweep) throw std::invalid_argument("config error: statics needs a sweep block");
    const SweepReport rep =
        comparative_sweep(cfg.model, cfg.sweep->axis, cfg.sweep->values, cfg.grid, cfg.solve);
    std::string csv = "axisValue,pi,sStar,rho\n";
    for (std::size_t v = 0; v < rep.values.size(); ++v) {
        for (std::size_t jdx = 0; jdx < cfg.grid.size(); ++jdx) {
            csv += format_sig12(rep.values[v]) + ',' + format_sig12(cfg.grid.points[jdx]) +
                   ',' + format_sig12(rep.cutoffs[v][jdx]) + ',' +
                   format_sig12(rep.rhos[v][jdx]) + '\n';
        }
    }
    const std::string path = out_path(cfg, "statics.csv");
    write_text_file(path, csv);

    json report;
    report["axis"] = cfg.sweep->axis == SweepAxis::SigmaH   ? "sigmaH"
                     : cfg.sweep->axis == SweepAxis::Lambda ? "lambda"
                                                            : "delta";
    report["steps"] = json::array();
    for (const auto& s : rep.steps) {
        json step{{"from", s.from_value},
                  {"to", s.to_value},
                  {"expectedSign", s.expected_sign},
                  {"violations", s.violations},
                  {"comparedPoints", s.compared_points}};
        step["violatingPis"] = s.violating_pis;
        report["steps"].push_back(step);
    }
    write_text_file(out_path(cfg, "statics_report.json"), report.dump(2) + "\n");
    write_sidecar(path, "statics", cfg, 0, {});
    std::printf("statics: %d violations across %zu steps -> %s\n", rep.total_violations(),
                rep.steps.size(), path.c_str());
    return kExitOk;
}

int cmd_bonus(const RunConfig& cfg, const CliOptions&) {
    if (!cfg.bonus) throw std::invalid_argument("config error: bonus needs a bonus block");
    const EquilibriumSolution sol = solve_equilibrium(cfg.model, cfg.grid, cfg.solve);
    const BonusConfig& bc = *cfg.bonus;

    std::string csv = "pi,beta1,beta0,sStarBeta,rho,rhoPrimeAnalytic,rhoPrimeFD\n";
    for (double pi : bc.pis) {
        for (double beta1 : bc.beta1_values) {
            const CutoffResult c =
                bonus_cutoff(pi, sol.value, cfg.model, {beta1, bc.beta0}, cfg.solve);
            const double rho = gaussian_tails(c.cutoff, cfg.model).r_h;
            double analytic = std::numeric_limits<double>::quiet_NaN();
            double fd = std::numeric_limits<double>::quiet_NaN();
            if (!c.clamped() && bc.beta0 == 0.0) {
                try {
                    analytic = rho_prime(pi, sol.value, cfg.model, beta1, cfg.solve);
                    const double h = 1e-4;
                    const double up = rho_of_bonus(pi, sol.value, cfg.model, beta1 + h, cfg.solve);
                    const double dn =
                        rho_of_bonus(pi, sol.value, cfg.model, std::max(0.0, beta1 - h), cfg.solve);
                    fd = (up - dn) / (beta1 - h >= 0.0 ? 2.0 * h : h);
                } catch (const IneffectiveInstrument&) {
                }
            }
            csv += format_sig12(pi) + ',' + format_sig12(beta1) + ',' + format_sig12(bc.beta0) +
                   ',' + format_sig12(c.cutoff) + ',' + format_sig12(rho) + ',' +
                   format_sig12(analytic) + ',' + format_sig12(fd) + '\n';
        }
    }
    const std::string path = out_path(cfg, "bonus.csv");
    write_text_file(path, csv);
    write_sidecar(path, "bonus", cfg, sol.content_hash(), verify_solution(sol));

    if (bc.rho_target) {
        json cal = json::array();
        for (double pi : bc.pis) {
            json row{{"pi", pi}, {"rhoTarget", *bc.rho_target}};
            try {
                const double beta = calibrate_bonus(pi, sol.value, cfg.model, *bc.rho_target,
                                                    cfg.solve);
                row["beta1"] = beta;
                row["rhoAchieved"] = rho_of_bonus(pi, sol.value, cfg.model, beta, cfg.solve);
            } catch (const std::exception& e) {
                row["error"] = e.what();
            }
            cal.push_back(row);
        }
        write_text_file(out_path(cfg, "bonus_calibration.json"), cal.dump(2) + "\n");
    }
    std::printf("bonus: %zu beliefs x %zu transfers -> %s\n", bc.pis.size(),
                bc.beta1_values.size(), path.c_str());
    return kExitOk;
}

int cmd_committee(const RunConfig& cfg, const CliOptions&) {
    if (!cfg.committee) {
        throw std::invalid_argument("config error: committee needs a committee block");
    }
    CommitteeSpec spec = *cfg.committee;
    std::string csv = "n,rule,lambda,rho0,rho1,zeta\n";
    auto emit = [&](const CommitteeSpec& s, const std::string& rule) {
        const double zeta = s.uses_threshold() && s.shared ? pivot_k_of_n(s) : pivot_general(s);
        csv += std::to_string(s.n) + ',' + rule + ',' + format_sig12(s.lambda) + ',' +
               (s.shared ? format_sig12(s.shared_rho[0]) : std::string("per-member")) + ',' +
               (s.shared ? format_sig12(s.shared_rho[1]) : std::string("per-member")) + ',' +
               format_sig12(zeta) + '\n';
    };
    if (!cfg.committee_k_values.empty()) {
        for (int k : cfg.committee_k_values) {
            CommitteeSpec s = spec;
            s.threshold_k = k;
            s.influence.clear();
            emit(s, std::to_string(k));
        }
    } else if (spec.uses_threshold() || !spec.influence.empty()) {
        emit(spec, spec.uses_threshold() ? std::to_string(spec.threshold_k)
                                         : std::string("profile"));
    } else {
        for (int k = 1; k <= spec.n; ++k) {
            CommitteeSpec s = spec;
            s.threshold_k = k;
            emit(s, std::to_string(k));
        }
    }
    const std::string path = out_path(cfg, "committee.csv");
    write_text_file(path, csv);
    write_sidecar(path, "committee", cfg, 0, {});
    std::printf("committee: n=%d -> %s\n", spec.n, path.c_str());
    return kExitOk;
}

int cmd_ctlimit(const RunConfig& cfg, const CliOptions&) {
    const EquilibriumSolution sol = solve_equilibrium(cfg.model, cfg.grid, cfg.solve);
    const auto checks = verify_solution(sol);
    const auto ct = ct_coefficients(sol);
    const auto drift = drift_and_kl(sol);
    json doc;
    for (std::size_t j = 0; j < ct.size(); ++j) {
        json row{{"mu", ct[j].mu},
                 {"sigma2", ct[j].sigma2},
                 {"Lambda", ct[j].intensity},
                 {"rho", ct[j].rho},
                 {"driftH", drift[j].drift_h},
                 {"driftL", drift[j].drift_l},
                 {"klDrift", drift[j].kl_drift}};
        doc[format_sig12(ct[j].pi)] = row;
    }
    const std::string path = out_path(cfg, "ctlimit.json");
    write_text_file(path, doc.dump(2) + "\n");
    write_sidecar(path, "ctlimit", cfg, sol.content_hash(), checks);
    std::printf("ctlimit: %zu grid points -> %s\n", ct.size(), path.c_str());
    return kExitOk;
}

int cmd_measure(const RunConfig& cfg, const CliOptions& opt) {
    const EquilibriumSolution sol = solve_equilibrium(cfg.model, cfg.grid, cfg.solve);
    const auto checks = verify_solution(sol);
    SimConfig sim = cfg.sim.value_or(SimConfig{});
    sim.settings.seed = cfg.seed;

    // theta-mixed panel: replications 0..R-1 are high types, R..2R-1 low types.
    SimSettings sh = sim.settings;
    sh.true_type = ExpertType::High;
    SimSettings slw = sim.settings;
    slw.true_type = ExpertType::Low;
    slw.seed = sim.settings.seed + 1;
    const PathEnsemble ens_h = simulate_paths(sol, sh, opt.threads);
    const PathEnsemble ens_l = simulate_paths(sol, slw, opt.threads);

    PathEnsemble merged = ens_h;
    merged.replications.insert(merged.replications.end(), ens_l.replications.begin(),
                               ens_l.replications.end());

    const auto panel = panel_from_ensemble(merged);
    const auto series = beta_bernoulli_series(panel, cfg.measure.alpha0, cfg.measure.beta0,
                                              cfg.measure.risky_only);
    const RegressionTables tables = regression_tables(merged, series);

    const std::string header1 = "expert,t,repLag,a\n";
    const std::string header2 = "expert,t,repLag,y\n";
    const std::string header3 = "expert,t,repLag,dSuccess,dFailure,failXrep,dRep\n";
    auto join = [](const std::string& header, const std::vector<std::string>& rows) {
        std::string out = header;
        for (const auto& r : rows) out += r + '\n';
        return out;
    };
    const std::string p1 = out_path(cfg, "p1.csv");
    write_text_file(p1, join(header1, tables.p1_rows));
    write_text_file(out_path(cfg, "p2.csv"), join(header2, tables.p2_rows));
    write_text_file(out_path(cfg, "p3.csv"), join(header3, tables.p3_rows));

    json diag{{"corrActionRep", tables.corr_action_rep},
              {"corrSuccessRep", tables.corr_success_rep},
              {"diagnosticsValid", tables.diagnostics_valid},
              {"p1Rows", tables.p1_rows.size()},
              {"p2Rows", tables.p2_rows.size()},
              {"p3Rows", tables.p3_rows.size()}};
    write_text_file(out_path(cfg, "measure_diagnostics.json"), diag.dump(2) + "\n");
    write_sidecar(p1, "measure", cfg, sol.content_hash(), checks);
    std::printf("measure: p1=%zu p2=%zu p3=%zu rows, corr(a,rep)=%s corr(y|a,rep)=%s\n",
                tables.p1_rows.size(), tables.p2_rows.size(), tables.p3_rows.size(),
                format_sig12(tables.corr_action_rep).c_str(),
                format_sig12(tables.corr_success_rep).c_str());
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const CliOptions&) {
    std::vector<CheckResult> checks;
    if (cfg.verify.solution_file) {
        checks = verify_solution_file(*cfg.verify.solution_file, cfg.model, cfg.grid, cfg.solve);
    } else {
        checks = verify_full(cfg.model, cfg.grid, cfg.solve);
    }
    bool ok = true;
    for (const auto& c : checks) {
        std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
        ok = ok && c.pass;
    }
    if (!ok) {
        for (const auto& c : checks) {
            if (!c.pass) {
                std::printf("verify: first failed invariant: %s\n", c.name.c_str());
                break;
            }
        }
    }
    return ok ? kExitOk : kExitVerification;
}

}  // namespace

int run_cli(const CliOptions& options) {
    try {
        RunConfig cfg = load_config(options.config_path);
        if (options.out_dir) cfg.output_dir = *options.out_dir;
        if (options.seed) cfg.seed = *options.seed;
        if (options.format != "csv" && options.format != "json") {
            throw std::invalid_argument("config error: --format must be csv or json");
        }

        const std::string& cmd = options.command;
        if (cmd == "solve") return cmd_solve(cfg, options);
        if (cmd == "simulate") return cmd_simulate(cfg, options);
        if (cmd == "statics") return cmd_statics(cfg, options);
        if (cmd == "bonus") return cmd_bonus(cfg, options);
        if (cmd == "committee") return cmd_committee(cfg, options);
        if (cmd == "ctlimit") return cmd_ctlimit(cfg, options);
        if (cmd == "measure") return cmd_measure(cfg, options);
        if (cmd == "verify") return cmd_verify(cfg, options);
        throw std::invalid_argument("config error: unknown command " + cmd);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const SolveError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        if (!e.residual_history.empty()) {
            std::fprintf(stderr, "residual history (last 5):");
            const std::size_t from =
                e.residual_history.size() > 5 ? e.residual_history.size() - 5 : 0;
            for (std::size_t i = from; i < e.residual_history.size(); ++i) {
                std::fprintf(stderr, " %g", e.residual_history[i]);
            }
            std::fprintf(stderr, "\n");
        }
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
}

}  // namespace repdyn
