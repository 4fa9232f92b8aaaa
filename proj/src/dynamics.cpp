#include "repdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace repdyn {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

CounterRng CounterRng::substream(std::uint64_t seed, std::uint64_t index) {
    CounterRng r;
    r.state_ = mix64(seed ^ mix64(index));
    return r;
}

std::uint64_t CounterRng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double CounterRng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    double u1 = next_uniform();
    while (u1 <= 0.0) u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

void SimSettings::validate() const {
    if (!(pi0 > 0.0 && pi0 < 1.0)) throw std::invalid_argument("SimSettings: pi0 must lie in (0,1)");
    if (horizon < 1) throw std::invalid_argument("SimSettings: horizon must be >= 1");
    if (replications < 1) throw std::invalid_argument("SimSettings: replications must be >= 1");
}

namespace {

double interp_cutoff(const EquilibriumSolution& sol, double pi) {
    const auto& pts = sol.points;
    if (pi <= pts.front().pi) return pts.front().cutoff;
    if (pi >= pts.back().pi) return pts.back().cutoff;
    std::size_t lo = 0, hi = pts.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (pts[mid].pi <= pi ? lo : hi) = mid;
    }
    const double t = (pi - pts[lo].pi) / (pts[hi].pi - pts[lo].pi);
    return pts[lo].cutoff + t * (pts[hi].cutoff - pts[lo].cutoff);
}

void run_replication(const EquilibriumSolution& sol, const SimSettings& sim, int rep,
                     std::vector<PathStep>& out, int& clamps) {
    const ModelParams& p = sol.params;
    CounterRng rng = CounterRng::substream(sim.seed, static_cast<std::uint64_t>(rep));
    const bool high = sim.true_type == ExpertType::High;
    const double sigma = high ? p.sigma_h : p.sigma_l;

    double pi = sim.pi0;
    out.resize(sim.horizon);
    for (int t = 0; t < sim.horizon; ++t) {
        const double cutoff_pub = interp_cutoff(sol, pi);
        const BranchDistribution b = branch_distribution(pi, cutoff_pub, p);

        const int omega = rng.next_uniform() < p.lambda ? 1 : 0;
        const double mean = omega == 1 ? p.mu1 : p.mu0;
        const double s = mean + sigma * rng.next_normal();

        int a;
        if (high) {
            a = s >= cutoff_pub ? 1 : 0;
        } else if (p.low_type == LowTypeBehavior::CutoffOffset) {
            a = s >= cutoff_pub + p.delta_l ? 1 : 0;
        } else {
            // Frequency-matching mimicry: risky with the high type's frequency,
            // independently of the signal.
            a = rng.next_uniform() < b.r_h ? 1 : 0;
        }

        int y = 0;
        double pi_next;
        if (a == 0) {
            pi_next = p.safe_update == SafeUpdate::Freeze ? pi : b.pi_rec0;
        } else {
            // Success needs a good state and the effort coin; e* comes from the
            // public branch at pi_t, not the private signal.
            y = (omega == 1 && rng.next_uniform() < b.effort) ? 1 : 0;
            pi_next = y == 1 ? b.pi_plus : b.pi_minus;
        }
        const double clamped = clamp_belief(pi_next);
        if (clamped != pi_next) ++clamps;
        out[t] = {pi, omega, s, a, y, clamped};
        pi = clamped;
    }
}

}  // namespace

PathEnsemble simulate_paths(const EquilibriumSolution& sol, const SimSettings& sim,
                            int threads) {
    sim.validate();
    if (sol.points.empty()) throw std::invalid_argument("simulate_paths: empty solution");
    if (threads < 1) threads = 1;

    PathEnsemble ens;
    ens.settings = sim;
    ens.solution_hash = sol.content_hash();
    ens.replications.resize(sim.replications);
    std::vector<int> clamp_counts(sim.replications, 0);

    auto worker = [&](int from, int to) {
        for (int r = from; r < to; ++r) {
            run_replication(sol, sim, r, ens.replications[r], clamp_counts[r]);
        }
    };
    if (threads == 1 || sim.replications == 1) {
        worker(0, sim.replications);
    } else {
        const int nthreads = std::min(threads, sim.replications);
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        const int chunk = (sim.replications + nthreads - 1) / nthreads;
        for (int i = 0; i < nthreads; ++i) {
            const int from = i * chunk;
            const int to = std::min(sim.replications, from + chunk);
            if (from < to) pool.emplace_back(worker, from, to);
        }
        for (auto& th : pool) th.join();
    }
    for (int c : clamp_counts) ens.clamp_events += c;
    return ens;
}

double branch_consistency_residual(const BranchDistribution& b, double pi) {
    double mix = 0.0;
    for (const auto& e : b.entries) {
        mix += (pi * e.prob_h + (1.0 - pi) * e.prob_l) * e.posterior;
    }
    return std::abs(mix - pi);
}

double bayes_consistency_residual(const EquilibriumSolution& sol) {
    double worst = 0.0;
    for (const auto& pt : sol.points) {
        worst = std::max(worst, branch_consistency_residual(pt.branch, pt.pi));
    }
    return worst;
}

std::vector<DriftRow> drift_and_kl(const EquilibriumSolution& sol) {
    std::vector<DriftRow> rows;
    rows.reserve(sol.points.size());
    for (const auto& pt : sol.points) {
        DriftRow r{pt.pi, 0.0, 0.0, 0.0};
        for (const auto& e : pt.branch.entries) {
            r.drift_h += e.prob_h * (e.posterior - pt.pi);
            r.drift_l += e.prob_l * (e.posterior - pt.pi);
            if (e.prob_h > 0.0 && e.prob_l > 0.0) {
                r.kl_drift += e.prob_h * std::log(e.prob_h / e.prob_l);
            }
        }
        rows.push_back(r);
    }
    return rows;
}

BoundaryReport boundary_hitting(const PathEnsemble& ens, double pi_low, double pi_high) {
    if (!(pi_low < pi_high)) {
        throw std::invalid_argument("boundary_hitting: need piLow < piHigh");
    }
    BoundaryReport rep;
    const int n = static_cast<int>(ens.replications.size());
    if (n == 0) throw std::invalid_argument("boundary_hitting: empty ensemble");
    int low = 0, high = 0, neither = 0;
    for (const auto& path : ens.replications) {
        int hit = 0;  // -1 low, +1 high
        for (const auto& step : path) {
            if (step.pi <= pi_low || step.pi_next <= pi_low) { hit = -1; break; }
            if (step.pi >= pi_high || step.pi_next >= pi_high) { hit = +1; break; }
        }
        if (hit < 0) ++low;
        else if (hit > 0) ++high;
        else ++neither;
    }
    rep.frac_low = static_cast<double>(low) / n;
    rep.frac_high = static_cast<double>(high) / n;
    rep.frac_neither = static_cast<double>(neither) / n;
    return rep;
}

std::vector<CTRow> ct_coefficients(const EquilibriumSolution& sol) {
    std::vector<CTRow> rows;
    rows.reserve(sol.points.size());
    for (const auto& pt : sol.points) {
        const BranchDistribution& b = pt.branch;
        CTRow r;
        r.pi = pt.pi;
        r.rho = pt.rho;
        r.intensity = b.lambda_post * b.effort;
        r.mu = r.rho * (r.intensity * b.j_plus + (1.0 - r.intensity) * b.j_minus);
        r.sigma2 = r.rho * (r.intensity * b.j_plus * b.j_plus +
                            (1.0 - r.intensity) * b.j_minus * b.j_minus);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace repdyn
