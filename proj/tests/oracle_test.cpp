#include <cmath>

#include <gtest/gtest.h>

#include "radfix/oracle.hpp"
#include "radfix/solver.hpp"
#include "test_support.hpp"

using namespace radfix;
using namespace radfix::testing;

TEST(ShootSolve, LinearCaseIsUniformDensity) {
    // R = 0: Q = m r^d exactly, central density m d / sigma.
    const double m = 0.2;
    for (double d : {3.0, 4.0}) {
        const ProblemParams params(d, m, NonlinearitySpec::tabulated({0.0, 1.0}, {0.0, 0.0}, 1e-3));
        const auto g = make_grid(512, 2.0);
        const auto shot = shoot_solve(params, g);
        // Q itself is resolved to ~1e-11, but a carries the RK4 error accumulated
        // between r0 and the first node (~1e-8 relative at d = 3, ~1e-7 at d = 4).
        EXPECT_NEAR(shot.central_density, m * d / params.sigma_d(), 1e-6 * m * d / params.sigma_d());
        EXPECT_NEAR(shot.profile.q().back(), m, 1e-12 * std::max(1.0, m));
        for (std::size_t i = 0; i < g->size(); ++i) {
            EXPECT_NEAR(shot.profile.q()[i], m * std::pow(g->node(i), d), 1e-10);
        }
    }
}

TEST(ShootSolve, SmallMassLimit) {
    const double d = 3.0;
    const auto g = make_grid(1024, 2.0);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double m : {1e-3, 1e-4}) {
        const ProblemParams params(d, m, NonlinearitySpec::identity());
        const auto shot = shoot_solve(params, g);
        const double gap = std::abs(shot.central_density / m - d / params.sigma_d());
        EXPECT_LT(gap, 1e-3 * d / params.sigma_d());
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
        EXPECT_GT(shot.central_density, 0.0);
    }
}

TEST(ShootSolve, AgreesWithPicard) {
    for (double d : {3.0, 4.0}) {
        for (double m : {0.05, 0.1}) {
            const ProblemParams params(d, m, NonlinearitySpec::identity());
            const auto g = make_grid(2048, 2.0);
            const auto shot = shoot_solve(params, g);
            const auto rep = picard_solve(params, g, {1e-12, 200, std::nullopt});
            const auto cmp = compare_profiles(rep.profile, shot.profile, d);
            EXPECT_LE(cmp.sup_q_diff, 1e-5 * m);
            EXPECT_LE(cmp.weighted_pair_diff, 1e-4);
            // Frozen regression bound: observed <= 6.5e-10 for all four cases.
            EXPECT_LE(cmp.weighted_pair_diff, 1e-9);
            EXPECT_LE(residual(shot.profile, params), 10 * rep.residual_sup);
            EXPECT_NEAR(shot.profile.q().back(), m, 1e-12);
        }
    }
}

TEST(ShootSolve, SaturatingNonlinearityAgrees) {
    const ProblemParams params(3.0, 0.15, NonlinearitySpec::saturating(0.005));
    const auto g = make_grid(1024, 2.0);
    const auto shot = shoot_solve(params, g);
    const auto rep = picard_solve(params, g, {1e-12, 200, std::nullopt});
    EXPECT_LE(compare_profiles(rep.profile, shot.profile, 3.0).weighted_pair_diff, 1e-6);
}

TEST(ShootSolve, Rejects) {
    const auto g = make_grid(64, 2.0);
    const ProblemParams params(3.0, 0.1, NonlinearitySpec::identity());
    ShootOptions bad;
    bad.tol = 0.0;
    EXPECT_THROW(shoot_solve(params, g, bad), DomainError);
    EXPECT_THROW(shoot_solve(ProblemParams::allow_zero_mass(3.0, 0.0, NonlinearitySpec::identity()), g),
                 DomainError);
}

TEST(ShootSolve, BracketFailureWhenShotsExhausted) {
    const ProblemParams params(3.0, 0.1, NonlinearitySpec::identity());
    ShootOptions opts;
    opts.max_shots = 1;
    opts.tol = 1e-14;
    EXPECT_THROW(shoot_solve(params, make_grid(64, 2.0), opts), BracketError);
}

TEST(CompareProfiles, Examples) {
    const auto g = make_grid(64, 2.0);
    const auto a = power_profile(g, 3.0, 0.2);
    const auto same = compare_profiles(a, a, 3.0);
    EXPECT_EQ(same.sup_q_diff, 0.0);
    EXPECT_EQ(same.sup_qprime_diff, 0.0);
    EXPECT_EQ(same.weighted_pair_diff, 0.0);

    std::vector<double> q(a.q().begin(), a.q().end());
    for (std::size_t i = 1; i < q.size(); ++i) q[i] += 0.01;
    const ProfilePair shifted(g, q, std::vector<double>(a.qprime().begin(), a.qprime().end()));
    const auto cmp = compare_profiles(a, shifted, 3.0);
    EXPECT_NEAR(cmp.sup_q_diff, 0.01, 1e-15);
    EXPECT_EQ(cmp.sup_qprime_diff, 0.0);

    EXPECT_THROW(compare_profiles(a, power_profile(make_grid(65, 2.0), 3.0, 0.2), 3.0), DomainError);
}
