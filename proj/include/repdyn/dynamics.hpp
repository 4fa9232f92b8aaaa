#pragma once

#include <cstdint>
#include <vector>

#include "repdyn/solver.hpp"

namespace repdyn {

// Counter-based generator: splitmix64 output function applied to a per-stream
// key mixed from (seed, stream index). Substreams are independent, so
// replications can run on any number of threads with identical results.
class CounterRng {
  public:
    static CounterRng substream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();
    double next_uniform();  // [0, 1)
    double next_normal();   // Box-Muller, caches the second draw

  private:
    std::uint64_t state_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

enum class ExpertType { High, Low };

struct SimSettings {
    double pi0 = 0.5;
    int horizon = 150;       // T
    int replications = 250;  // R
    std::uint64_t seed = 0;
    ExpertType true_type = ExpertType::High;

    void validate() const;
};

struct PathStep {
    double pi;       // belief at the start of the period
    int omega;       // period state
    double signal;   // expert's private signal
    int action;      // 1 = risky recommendation
    int outcome;     // y; 0 whenever action = 0
    double pi_next;  // belief after the public observation
};

struct PathEnsemble {
    SimSettings settings;
    std::uint64_t solution_hash = 0;
    std::vector<std::vector<PathStep>> replications;  // [rep][t]
    int clamp_events = 0;  // posteriors pushed back into (0,1)
};

// Simulates public reputation paths under the solved cutoff policy with the
// expert's true type fixed. The public updates along the equilibrium branch at
// pi_t (cutoff linearly interpolated from the solution grid); the private
// signal only moves the action. Deterministic given the seed; replications may
// run in parallel and are merged in index order.
PathEnsemble simulate_paths(const EquilibriumSolution& sol, const SimSettings& sim,
                            int threads = 1);

// Max over the grid of |E[pi' | pi] - pi| under the public observation mixture.
double bayes_consistency_residual(const EquilibriumSolution& sol);

// Same residual for a single branch (exposed so tests can corrupt a branch).
double branch_consistency_residual(const BranchDistribution& b, double pi);

struct DriftRow {
    double pi;
    double drift_h;   // E[pi' - pi | theta = H]
    double drift_l;   // E[pi' - pi | theta = L]
    double kl_drift;  // E[log L | theta = H]
};

// Closed-form one-step conditional drifts over the three-branch lottery.
std::vector<DriftRow> drift_and_kl(const EquilibriumSolution& sol);

struct BoundaryReport {
    double frac_low = 0.0;      // first boundary hit was the low one
    double frac_high = 0.0;     // first boundary hit was the high one
    double frac_neither = 0.0;  // never crossed either
};

BoundaryReport boundary_hitting(const PathEnsemble& ens, double pi_low, double pi_high);

struct CTRow {
    double pi;
    double mu;         // log-odds drift rate
    double sigma2;     // log-odds variance rate
    double intensity;  // success intensity Lambda = lambda_post * e*
    double rho;
};

// Continuous-time limit coefficients of the log-odds process.
std::vector<CTRow> ct_coefficients(const EquilibriumSolution& sol);

}  // namespace repdyn
