#include "repdyn/committee.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repdyn {

void CommitteeSpec::validate() const {
    if (n < 1) throw std::invalid_argument("CommitteeSpec: n must be >= 1");
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("CommitteeSpec: lambda must lie in (0,1)");
    }
    if (uses_threshold()) {
        if (threshold_k > n) throw std::invalid_argument("CommitteeSpec: k must lie in [1, n]");
    } else {
        if (static_cast<int>(influence.size()) != n) {
            throw std::invalid_argument("CommitteeSpec: influence profile needs n entries");
        }
        int up = 0, down = 0;
        for (int m = 0; m + 1 < n; ++m) {
            if (influence[m] != 0 && influence[m] != 1) {
                throw std::invalid_argument("CommitteeSpec: influence values must be 0 or 1");
            }
            if (influence[m] == 0 && influence[m + 1] == 1) ++up;
            if (influence[m] == 1 && influence[m + 1] == 0) ++down;
        }
        if (!influence.empty() && influence.back() != 0 && influence.back() != 1) {
            throw std::invalid_argument("CommitteeSpec: influence values must be 0 or 1");
        }
        if (up > 1 || down > 1) {
            throw std::invalid_argument(
                "CommitteeSpec: influence profile must be weakly single-peaked");
        }
    }
    for (int w = 0; w < 2; ++w) {
        if (shared) {
            if (!(shared_rho[w] >= 0.0 && shared_rho[w] <= 1.0)) {
                throw std::invalid_argument("CommitteeSpec: probabilities must lie in [0,1]");
            }
        } else {
            if (static_cast<int>(member_rho[w].size()) != n - 1) {
                throw std::invalid_argument("CommitteeSpec: need n-1 member probabilities");
            }
            for (double q : member_rho[w]) {
                if (!(q >= 0.0 && q <= 1.0)) {
                    throw std::invalid_argument("CommitteeSpec: probabilities must lie in [0,1]");
                }
            }
        }
    }
}

namespace {

// Binomial pmf b_{N,j}(p), stable at the p = 0, 1 corners.
double binomial_pmf(int n, int j, double p) {
    if (j < 0 || j > n) return 0.0;
    if (p <= 0.0) return j == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return j == n ? 1.0 : 0.0;
    const double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    return std::exp(logc + j * std::log(p) + (n - j) * std::log1p(-p));
}

double pivot_from_pmf(const CommitteeSpec& spec, const std::vector<double>& pmf0,
                      const std::vector<double>& pmf1) {
    double z0 = 0.0, z1 = 0.0;
    for (int m = 0; m < spec.n; ++m) {
        const double infl = spec.uses_threshold()
                                ? (m == spec.threshold_k - 1 ? 1.0 : 0.0)
                                : static_cast<double>(spec.influence[m]);
        if (m < static_cast<int>(pmf0.size())) z0 += infl * pmf0[m];
        if (m < static_cast<int>(pmf1.size())) z1 += infl * pmf1[m];
    }
    return spec.lambda * z1 + (1.0 - spec.lambda) * z0;
}

double pivot_enumerated(const CommitteeSpec& spec) {
    const int others = spec.n - 1;
    double z0 = 0.0, z1 = 0.0;
    for (int w = 0; w < 2; ++w) {
        double acc = 0.0;
        for (std::uint64_t mask = 0; mask < (1ull << others); ++mask) {
            double weight = 1.0;
            int m = 0;
            for (int j = 0; j < others; ++j) {
                const double q = spec.shared ? spec.shared_rho[w] : spec.member_rho[w][j];
                if (mask & (1ull << j)) {
                    weight *= q;
                    ++m;
                } else {
                    weight *= 1.0 - q;
                }
            }
            const double infl = spec.uses_threshold()
                                    ? (m == spec.threshold_k - 1 ? 1.0 : 0.0)
                                    : static_cast<double>(spec.influence[m]);
            acc += weight * infl;
        }
        (w == 0 ? z0 : z1) = acc;
    }
    return spec.lambda * z1 + (1.0 - spec.lambda) * z0;
}

}  // namespace

double pivot_k_of_n(const CommitteeSpec& spec) {
    spec.validate();
    if (!spec.uses_threshold()) {
        throw std::invalid_argument("pivot_k_of_n: spec has no threshold rule");
    }
    if (!spec.shared) {
        throw std::invalid_argument("pivot_k_of_n: requires shared member probabilities");
    }
    const int nm1 = spec.n - 1;
    const int km1 = spec.threshold_k - 1;
    return spec.lambda * binomial_pmf(nm1, km1, spec.shared_rho[1]) +
           (1.0 - spec.lambda) * binomial_pmf(nm1, km1, spec.shared_rho[0]);
}

std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs) {
    if (probs.size() > 64) {
        throw std::invalid_argument("poisson_binomial_pmf: direct recursion supports N <= 64");
    }
    for (double q : probs) {
        if (!(q >= 0.0 && q <= 1.0)) {
            throw std::invalid_argument("poisson_binomial_pmf: probabilities must lie in [0,1]");
        }
    }
    std::vector<double> pmf(probs.size() + 1, 0.0);
    pmf[0] = 1.0;
    std::size_t used = 0;
    for (double q : probs) {
        ++used;
        for (std::size_t m = used; m >= 1; --m) {
            pmf[m] = pmf[m] * (1.0 - q) + pmf[m - 1] * q;
        }
        pmf[0] *= 1.0 - q;
    }
    return pmf;
}

double pivot_general(const CommitteeSpec& spec) {
    spec.validate();
    const int others = spec.n - 1;

    std::vector<double> pmf0, pmf1;
    if (spec.shared) {
        pmf0.resize(others + 1);
        pmf1.resize(others + 1);
        for (int m = 0; m <= others; ++m) {
            pmf0[m] = binomial_pmf(others, m, spec.shared_rho[0]);
            pmf1[m] = binomial_pmf(others, m, spec.shared_rho[1]);
        }
    } else {
        pmf0 = poisson_binomial_pmf(spec.member_rho[0]);
        pmf1 = poisson_binomial_pmf(spec.member_rho[1]);
    }
    const double zeta = pivot_from_pmf(spec, pmf0, pmf1);

    if (others <= 20) {
        const double brute = pivot_enumerated(spec);
        if (std::abs(brute - zeta) > 1e-12) {
            throw std::logic_error("pivot_general: pmf route disagrees with enumeration");
        }
    }
    return zeta;
}

double committee_advantage(double s, double pi, const ValueFunction& v, const ModelParams& p,
                           double zeta) {
    if (!(zeta >= 0.0 && zeta <= 1.0)) {
        throw std::invalid_argument("committee_advantage: zeta must lie in [0,1]");
    }
    const BranchDistribution b = branch_distribution(pi, s, p);
    const double q = marginal_success_prob(s, b, p);
    const double option =
        q * v(b.pi_plus) + (1.0 - q) * v(b.pi_minus) - v(pi);
    const double rec_term = v(pi) - v(b.pi_rec0);
    return p.phi + p.delta * (zeta * option - rec_term);
}

CutoffResult committee_cutoff(double pi, const ValueFunction& v, const ModelParams& p,
                              double zeta, const SolveSettings& st) {
    if (!(zeta >= 0.0 && zeta <= 1.0)) {
        throw std::invalid_argument("committee_cutoff: zeta must lie in [0,1]");
    }
    MarginSpec spec;
    spec.zeta = zeta;
    spec.committee = true;
    return solve_margin_cutoff(pi, v, p, st, spec);
}

std::vector<PivotMonotonicityRow> pivot_monotonicity(const CommitteeSpec& spec, int k_from,
                                                     int k_to) {
    if (!spec.shared) {
        throw std::invalid_argument("pivot_monotonicity: requires shared probabilities");
    }
    if (k_from < 1 || k_to > spec.n || k_from >= k_to) {
        throw std::invalid_argument("pivot_monotonicity: bad k range");
    }
    std::vector<PivotMonotonicityRow> rows;
    for (int k = k_from; k < k_to; ++k) {
        CommitteeSpec a = spec;
        a.threshold_k = k;
        a.influence.clear();
        CommitteeSpec b = a;
        b.threshold_k = k + 1;
        PivotMonotonicityRow row;
        row.k = k;
        row.zeta_k = pivot_k_of_n(a);
        row.zeta_k1 = pivot_k_of_n(b);
        const double bound = static_cast<double>(k) / spec.n;
        row.condition_applies = spec.shared_rho[0] <= bound && spec.shared_rho[1] <= bound;
        row.decreasing = row.zeta_k1 <= row.zeta_k + 1e-15;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace repdyn
