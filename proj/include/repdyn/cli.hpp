#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repdyn/committee.hpp"
#include "repdyn/dynamics.hpp"
#include "repdyn/measure.hpp"
#include "repdyn/policy.hpp"
#include "repdyn/solver.hpp"

namespace repdyn {

// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerification = 4;

struct SweepConfig {
    SweepAxis axis = SweepAxis::SigmaH;
    std::vector<double> values;
};

struct BonusConfig {
    std::vector<double> pis;
    std::vector<double> beta1_values;
    double beta0 = 0.0;
    std::optional<double> rho_target;
};

struct BoundariesConfig {
    double pi_low = 0.1;
    double pi_high = 0.9;
};

struct MeasureConfig {
    double alpha0 = 1.0;
    double beta0 = 1.0;
    bool risky_only = true;
};

enum class SimType { High, Low, Both };

struct SimConfig {
    SimSettings settings;
    SimType type = SimType::Both;
};

struct VerifyConfig {
    std::optional<std::string> solution_file;
};

struct RunConfig {
    ModelParams model;
    SolveSettings solve;
    Grid grid = Grid::uniform();
    std::optional<SimConfig> sim;
    std::optional<SweepConfig> sweep;
    std::optional<BonusConfig> bonus;
    std::optional<CommitteeSpec> committee;
    std::vector<int> committee_k_values;  // sweep over thresholds when nonempty
    std::optional<BoundariesConfig> boundaries;
    MeasureConfig measure;
    VerifyConfig verify;
    std::string output_dir = ".";
    std::uint64_t seed = 0;

    std::string resolved_json;  // full resolved config, for sidecars
};

// Parses and validates the JSON config; unknown keys are errors with field
// paths. Throws std::invalid_argument with the offending path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

struct CliOptions {
    std::string command;
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string format = "csv";  // csv | json
};

// Runs one command end to end; prints a short report to stdout and returns the
// process exit code.
int run_cli(const CliOptions& options);

}  // namespace repdyn
