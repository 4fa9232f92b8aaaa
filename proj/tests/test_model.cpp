#include <cmath>

#include "doctest.h"
#include "repdyn/dynamics.hpp"
#include "repdyn/model.hpp"
#include "test_support.hpp"

using namespace repdyn;

TEST_CASE("normal cdf matches a high-precision oracle table") {
    // Reference values computed with 40-digit arithmetic (mpmath erfc).
    static const struct { double x, phi; } table[] = {
        {-8.5, 9.479534822203318354151e-18},
        {-6, 9.865876450376981407009e-10},
        {-4.75, 0.000001017083242568703171259},
        {-3.5, 0.0002326290790355250363499},
        {-2.25, 0.01222447265504470315262},
        {-1.5, 0.06680720126885806600449},
        {-1, 0.1586552539314570514148},
        {-0.625, 0.2659855290487005323103},
        {-0.5, 0.3085375387259868963623},
        {-0.1, 0.4601721627229710185346},
        {0, 0.5},
        {0.1, 0.5398278372770289814654},
        {0.5, 0.6914624612740131036377},
        {0.625, 0.7340144709512994676897},
        {1, 0.8413447460685429485852},
        {1.5, 0.9331927987311419339955},
        {2.25, 0.9877755273449552968474},
        {3.5, 0.9997673709209644749637},
        {4.75, 0.9999989829167574312968},
        {6, 0.9999999990134123549623},
        {8.5, 0.9999999999999999905205},
    };
    for (const auto& row : table) {
        CHECK(std::abs(normal_cdf(row.x) - row.phi) <= 1e-12);
        // tails need relative accuracy too
        if (row.phi < 0.5) {
            CHECK(std::abs(normal_cdf(row.x) - row.phi) <= 1e-13 * std::max(1.0, row.phi * 1e13));
        }
    }
}

TEST_CASE("gaussian tails at the good-state mean and in the far tail") {
    ModelParams p;
    const TailQuadruple at_mu1 = gaussian_tails(1.0, p);
    CHECK(at_mu1.a_h == doctest::Approx(0.5).epsilon(1e-14));

    const TailQuadruple far = gaussian_tails(-1e3, p);
    CHECK(far.a_h == doctest::Approx(1.0));
    CHECK(far.b_h == doctest::Approx(1.0));
    CHECK(far.a_l == doctest::Approx(1.0));
    CHECK(far.b_l == doctest::Approx(1.0));

    const TailQuadruple mid = gaussian_tails(0.5, p);
    CHECK(mid.a_h == doctest::Approx(0.73401).epsilon(1e-4));
    CHECK(mid.b_h == doctest::Approx(0.26599).epsilon(1e-4));
    CHECK(mid.r_h == doctest::Approx(p.lambda * mid.a_h + (1 - p.lambda) * mid.b_h));
}

TEST_CASE("tail ordering a >= b holds across cutoffs") {
    ModelParams p;
    for (int i = 0; i <= 200; ++i) {
        const double s = -8.0 + 16.0 * i / 200.0;
        const TailQuadruple t = gaussian_tails(s, p);
        CHECK(t.a_h >= t.b_h);
        CHECK(t.a_l >= t.b_l);
        CHECK(t.r_h >= 0.0);
        CHECK(t.r_h <= 1.0);
    }
}

TEST_CASE("model params validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.sigma_l = 0.5;  // below sigma_h
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.lambda = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.delta = 0.0;  // myopic benchmark stays admissible
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("recommendation posteriors by direct Bayes arithmetic") {
    // Choose a cutoff giving R_H = 0.6 under the offset construction, then an
    // offset giving R_L = 0.3, and check pi_rec against 2/3 and 4/11.
    ModelParams p;
    p.low_type = LowTypeBehavior::CutoffOffset;

    double lo = -8.0, hi = 8.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gaussian_tails(mid, p).r_h > 0.6 ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    REQUIRE(gaussian_tails(s, p).r_h == doctest::Approx(0.6).epsilon(1e-10));

    double dlo = 0.0, dhi = 12.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (dlo + dhi);
        p.delta_l = mid;
        (gaussian_tails(s, p).r_l > 0.3 ? dlo : dhi) = mid;
    }
    p.delta_l = 0.5 * (dlo + dhi);
    REQUIRE(gaussian_tails(s, p).r_l == doctest::Approx(0.3).epsilon(1e-10));

    const BranchDistribution b = branch_distribution(0.5, s, p);
    CHECK(b.pi_rec1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(b.pi_rec0 == doctest::Approx(4.0 / 11.0).epsilon(1e-9));
}

TEST_CASE("log-likelihood jump formulas at pinned values") {
    const double p_h = 0.8, p_l = 0.5, effort = 0.65;
    const double j_plus = std::log(p_h / p_l);
    const double j_minus = std::log((1 - effort * p_h) / (1 - effort * p_l));
    CHECK(j_plus == doctest::Approx(0.47000).epsilon(1e-4));
    CHECK(j_minus == doctest::Approx(-0.34104).epsilon(1e-4));
    // J- strictly decreasing in effort at fixed state posteriors.
    const double j_minus_hi =
        std::log((1 - 0.75 * p_h) / (1 - 0.75 * p_l));
    CHECK(j_minus_hi < j_minus);
}

TEST_CASE("symmetric types collapse the branch to the prior") {
    const ModelParams p = testing::symmetric_params();
    for (double pi : {0.1, 0.5, 0.9}) {
        for (double s : {-1.0, 0.3, 1.5}) {
            const BranchDistribution b = branch_distribution(pi, s, p);
            CHECK(b.pi_rec1 == doctest::Approx(pi).epsilon(1e-13));
            CHECK(b.pi_rec0 == doctest::Approx(pi).epsilon(1e-13));
            CHECK(b.j_plus == 0.0);
            CHECK(b.j_minus == 0.0);
            CHECK(b.pi_plus == doctest::Approx(pi).epsilon(1e-13));
            CHECK(b.pi_minus == doctest::Approx(pi).epsilon(1e-13));
        }
    }
}

TEST_CASE("branch probabilities are Bayes-consistent and well ordered") {
    for (LowTypeBehavior low : {LowTypeBehavior::MatchFrequency, LowTypeBehavior::CutoffOffset}) {
        ModelParams p;
        p.low_type = low;
        CounterRng rng = CounterRng::substream(42, low == LowTypeBehavior::MatchFrequency ? 0 : 1);
        for (int trial = 0; trial < 300; ++trial) {
            const double pi = 0.02 + 0.96 * rng.next_uniform();
            const double s = -4.0 + 8.0 * rng.next_uniform();
            const BranchDistribution b = branch_distribution(pi, s, p);

            double sum_h = 0.0, sum_l = 0.0;
            for (const auto& e : b.entries) {
                sum_h += e.prob_h;
                sum_l += e.prob_l;
                CHECK(e.posterior > 0.0);
                CHECK(e.posterior < 1.0);
            }
            CHECK(std::abs(sum_h - 1.0) <= 1e-12);
            CHECK(std::abs(sum_l - 1.0) <= 1e-12);
            CHECK(b.success_prob == b.lambda_post * b.effort);

            // law of iterated expectations
            CHECK(branch_consistency_residual(b, pi) <= 1e-10);

            // The sign claims are conditional on p_h >= p_l; the matching
            // construction satisfies it everywhere, the offset construction
            // only near equilibrium cutoffs.
            if (low == LowTypeBehavior::MatchFrequency) CHECK(b.p_h >= b.p_l - 1e-15);
            if (b.p_h >= b.p_l) {
                CHECK(b.j_plus >= -1e-15);
                CHECK(b.j_minus <= 1e-15);
            }
            if (b.j_plus > 1e-12 && b.j_minus < -1e-12) {
                CHECK(b.pi_plus > b.pi_rec1);
                CHECK(b.pi_rec1 > b.pi_minus);
            }
        }
    }
}

TEST_CASE("degenerate tails are flagged and fall back to priors") {
    ModelParams p;
    const double s = p.mu1 + 9.5 * p.sigma_h;  // risky recommendation essentially never
    const BranchDistribution b = branch_distribution(0.4, s, p);
    CHECK(b.degenerate);
    CHECK(b.p_h == doctest::Approx(p.lambda));
    CHECK(b.pi_rec1 == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("apply_log_odds identities") {
    CHECK(apply_log_odds(0.37, 0.0) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(apply_log_odds(0.5, std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK_THROWS_AS(apply_log_odds(0.0, 1.0), std::invalid_argument);

    CounterRng rng = CounterRng::substream(7, 7);
    for (int trial = 0; trial < 500; ++trial) {
        const double pi = 0.05 + 0.9 * rng.next_uniform();
        const double a = -3.0 + 6.0 * rng.next_uniform();
        const double b = -3.0 + 6.0 * rng.next_uniform();
        const double two_step = apply_log_odds(apply_log_odds(pi, a), b);
        CHECK(std::abs(logit(two_step) - (logit(pi) + a + b)) <= 1e-12);
    }
}

TEST_CASE("binary signal jumps and diagnosticity") {
    const BinaryJumps j = binary_jumps({0.9, 0.6});
    CHECK(j.l_plus == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(j.l_minus == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(j.failure_more_diagnostic);  // 0.09 <= 0.24

    CHECK_THROWS_AS(binary_jumps({0.6, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(binary_jumps({0.6, 0.4}), std::invalid_argument);

    // Within the admissible domain q_H > q_L > 1/2 the condition is implied:
    // x(1-x) is strictly decreasing on (1/2, 1). A brute scan confirms no
    // counterexample exists.
    for (int i = 1; i < 60; ++i) {
        for (int k = i + 1; k <= 60; ++k) {
            const double ql = 0.5 + 0.5 * i / 61.0;
            const double qh = 0.5 + 0.5 * k / 61.0;
            const BinaryJumps jj = binary_jumps({qh, ql});
            CHECK(jj.failure_more_diagnostic);
            CHECK(std::log(jj.l_plus) + std::log(jj.l_minus) <= 1e-12);
        }
    }
}

TEST_CASE("recommendation-only likelihood ratio") {
    const BinarySignalParams bp{0.9, 0.6};
    CHECK(binary_recommendation_lr(bp, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_recommendation_lr(bp, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(binary_recommendation_lr(bp, 0.8) == doctest::Approx(0.74 / 0.56).epsilon(1e-12));
}
