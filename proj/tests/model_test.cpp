#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "radfix/model.hpp"
#include "test_support.hpp"

using namespace radfix;
using radfix::testing::pi;

namespace {

// Gamma at half-integers and integers by the recurrence, seeded with
// Gamma(1/2) = sqrt(pi) and Gamma(1) = 1; independent of std::tgamma.
double gamma_half_integer(double x) {
    double g = std::fmod(x, 1.0) == 0.5 ? std::sqrt(pi) : 1.0;
    for (double t = std::fmod(x, 1.0) == 0.5 ? 0.5 : 1.0; t < x - 0.25; t += 1.0) {
        g *= t;
    }
    return g;
}

}  // namespace

TEST(SphereMeasure, ClosedForms) {
    EXPECT_NEAR(sphere_measure(3.0), 4.0 * pi, 1e-13);
    EXPECT_NEAR(sphere_measure(3.0), 12.566370614, 1e-9);
    EXPECT_NEAR(sphere_measure(4.0), 2.0 * pi * pi, 1e-13);
    EXPECT_NEAR(sphere_measure(4.0), 19.739208802, 1e-9);
}

TEST(SphereMeasure, FiveDimensionsAgainstIndependentGamma) {
    const double expected = 2.0 * std::pow(pi, 2.5) / gamma_half_integer(2.5);
    EXPECT_NEAR(expected, 8.0 * pi * pi / 3.0, 1e-12);
    EXPECT_NEAR(sphere_measure(5.0), expected, 1e-12);
    EXPECT_NEAR(sphere_measure(5.0), 26.318945070, 1e-9);
}

TEST(SphereMeasure, Recurrence) {
    for (double d : {3.0, 4.0, 5.0, 6.0}) {
        EXPECT_NEAR(sphere_measure(d + 2.0), sphere_measure(d) * 2.0 * pi / d, 1e-12 * sphere_measure(d + 2.0));
    }
}

TEST(SphereMeasure, RejectsLowDimensions) {
    EXPECT_THROW(sphere_measure(2.0), DomainError);
    EXPECT_THROW(sphere_measure(1.5), DomainError);
    EXPECT_THROW(sphere_measure(std::numeric_limits<double>::quiet_NaN()), DomainError);
    EXPECT_NO_THROW(sphere_measure(2.5));
}

TEST(Nonlinearity, Kinds) {
    const auto id = NonlinearitySpec::identity();
    EXPECT_EQ(id(0.0), 0.0);
    EXPECT_EQ(id(2.5), 2.5);
    EXPECT_EQ(id.lipschitz(), 1.0);

    const auto sat = NonlinearitySpec::saturating(2.0);
    EXPECT_EQ(sat(0.0), 0.0);
    EXPECT_DOUBLE_EQ(sat(2.0), 1.0);
    EXPECT_DOUBLE_EQ(sat(-2.0), -1.0);
    EXPECT_EQ(sat.lipschitz(), 1.0);

    const auto tab = NonlinearitySpec::tabulated({0.0, 1.0, 2.0}, {0.0, 0.5, 0.75}, 0.5);
    EXPECT_EQ(tab(0.0), 0.0);
    EXPECT_DOUBLE_EQ(tab(0.5), 0.25);
    EXPECT_DOUBLE_EQ(tab(1.5), 0.625);
    EXPECT_DOUBLE_EQ(tab(10.0), 0.75);
    EXPECT_DOUBLE_EQ(tab(-1.5), -0.625);
}

TEST(Nonlinearity, TabulatedValidation) {
    EXPECT_THROW(NonlinearitySpec::tabulated({0.0, 1.0}, {0.0, 2.0}, 1.0), DomainError);  // slope 2 > L
    EXPECT_THROW(NonlinearitySpec::tabulated({0.0, 1.0}, {0.1, 0.2}, 1.0), DomainError);  // R(0) != 0
    EXPECT_THROW(NonlinearitySpec::tabulated({0.5, 1.0}, {0.0, 0.2}, 1.0), DomainError);  // starts past 0
    EXPECT_THROW(NonlinearitySpec::tabulated({0.0, 0.0}, {0.0, 0.0}, 1.0), DomainError);  // not increasing
    EXPECT_THROW(NonlinearitySpec::tabulated({0.0}, {0.0}, 1.0), DomainError);
    EXPECT_THROW(NonlinearitySpec::saturating(0.0), DomainError);
}

TEST(Nonlinearity, SaturatingIsLipschitzOne) {
    const auto sat = NonlinearitySpec::saturating(0.3);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = u(rng), b = u(rng);
        EXPECT_LE(std::abs(sat(a) - sat(b)), std::abs(a - b) * (1.0 + 1e-15));
    }
}

TEST(ProblemParamsTest, Validation) {
    EXPECT_THROW(ProblemParams(2.0, 0.1, NonlinearitySpec::identity()), DomainError);
    EXPECT_THROW(ProblemParams(3.0, 0.0, NonlinearitySpec::identity()), DomainError);
    EXPECT_THROW(ProblemParams(3.0, -1.0, NonlinearitySpec::identity()), DomainError);
    EXPECT_NO_THROW(ProblemParams::allow_zero_mass(3.0, 0.0, NonlinearitySpec::identity()));
    const ProblemParams p(3.0, 0.1, NonlinearitySpec::identity());
    EXPECT_DOUBLE_EQ(p.sigma_d(), 4.0 * pi);
    EXPECT_EQ(ProblemParams::theta, 1.0);
}

TEST(MakeGrid, UniformTrapezoid) {
    const auto g = make_grid(16, 1.0);
    ASSERT_EQ(g->size(), 17u);
    const double h = 1.0 / 16.0;
    EXPECT_EQ(g->node(0), 0.0);
    EXPECT_EQ(g->node(16), 1.0);
    EXPECT_DOUBLE_EQ(g->weights()[0], h / 2);
    EXPECT_DOUBLE_EQ(g->weights()[16], h / 2);
    for (std::size_t i = 1; i < 16; ++i) {
        EXPECT_DOUBLE_EQ(g->weights()[i], h);
        EXPECT_DOUBLE_EQ(g->node(i), i * h);
    }
}

TEST(MakeGrid, GradedNodeRule) {
    const auto g = make_grid(16, 2.0);
    EXPECT_DOUBLE_EQ(g->node(1), 1.0 / 256.0);
    for (std::size_t i = 1; i < g->size(); ++i) {
        EXPECT_GT(g->node(i), g->node(i - 1));
    }
}

TEST(MakeGrid, WeightsIntegrateLinearFunctions) {
    for (std::size_t n : {16u, 17u, 100u, 1000u, 2048u}) {
        for (double gamma : {1.0, 1.5, 2.0, 3.0}) {
            const auto g = make_grid(n, gamma);
            double one = 0.0, lin = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) {
                EXPECT_GE(g->weights()[i], 0.0);
                one += g->weights()[i];
                lin += g->weights()[i] * (2.0 - 3.0 * g->node(i));
            }
            EXPECT_NEAR(one, 1.0, 1e-14) << n << " " << gamma;
            EXPECT_NEAR(lin, 0.5, 1e-13) << n << " " << gamma;
        }
    }
}

TEST(MakeGrid, Rejects) {
    EXPECT_THROW(make_grid(15, 2.0), DomainError);
    EXPECT_THROW(make_grid(64, 0.5), DomainError);
}

TEST(ProfilePairTest, Invariants) {
    const auto g = make_grid(16, 2.0);
    EXPECT_THROW(ProfilePair(g, std::vector<double>(16, 0.0), std::vector<double>(17, 0.0)), DomainError);
    std::vector<double> q(17, 1.0);
    EXPECT_THROW(ProfilePair(g, q, std::vector<double>(17, 0.0)), DomainError);
    EXPECT_THROW(ProfilePair::zero(g) - ProfilePair::zero(make_grid(17, 2.0)), DomainError);
}

TEST(WeightedNorm, Examples) {
    const auto g = make_grid(64, 2.0);
    for (double d : {3.0, 4.0, 5.0}) {
        const auto p = ProfilePair::sample(
            g, [&](double r) { return std::pow(r, d - 2.0); }, [&](double r) { return (d - 2.0) * std::pow(r, d - 3.0); });
        EXPECT_NEAR(weighted_norm(p, 2.0 - d, Component::value), 1.0, 1e-14);
    }
    EXPECT_EQ(weighted_norm(ProfilePair::zero(g), -1.0, Component::value), 0.0);
    EXPECT_EQ(pair_norm(ProfilePair::zero(g), 3.0), 0.0);

    // d = 3, Q = r(1-r): max over interior nodes of (1 - r_i) is attained at r_1.
    const auto p = ProfilePair::sample(g, [](double r) { return r * (1 - r); }, [](double r) { return 1 - 2 * r; });
    double brute = 0.0;
    for (std::size_t i = 1; i < g->size(); ++i) {
        brute = std::max(brute, std::abs(p.q()[i] / g->node(i)));
    }
    EXPECT_DOUBLE_EQ(weighted_norm(p, -1.0, Component::value), brute);
    EXPECT_NEAR(weighted_norm(p, -1.0, Component::value), 1.0 - g->node(1), 1e-15);
    EXPECT_THROW(weighted_norm(p, 0.5, Component::value), DomainError);
}

TEST(WeightedNorm, RejectsNonFinite) {
    const auto g = make_grid(16, 2.0);
    std::vector<double> q(17, 0.0);
    q[5] = std::numeric_limits<double>::infinity();
    const ProfilePair p(g, q, std::vector<double>(17, 0.0));
    EXPECT_THROW(weighted_norm(p, -1.0, Component::value), EvaluationError);
}

TEST(PairNorm, PowerProfile) {
    const auto g = make_grid(256, 2.0);
    const double m = 0.7;
    const auto p = radfix::testing::power_profile(g, 3.0, m);
    EXPECT_NEAR(weighted_norm(p, -1.0, Component::value), m, 1e-15);
    EXPECT_NEAR(weighted_norm(p, 0.0, Component::derivative), 3.0 * m, 1e-15);
    EXPECT_NEAR(pair_norm(p, 3.0), 3.0 * m, 1e-15);
}

TEST(PairNorm, HomogeneityTriangleAndDominance) {
    const auto g = make_grid(128, 2.0);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> scale(-10.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const double d = 3.0 + (k % 3);
        const auto p = radfix::testing::random_profile(g, d, rng);
        const auto s = radfix::testing::random_profile(g, d, rng);
        const double c = scale(rng);
        for (auto which : {Component::value, Component::derivative}) {
            const double alpha = which == Component::value ? 2.0 - d : 3.0 - d;
            EXPECT_NEAR(weighted_norm(c * p, alpha, which), std::abs(c) * weighted_norm(p, alpha, which),
                        1e-13 * std::abs(c) * weighted_norm(p, alpha, which));
        }
        EXPECT_LE(pair_norm(p + s, d), pair_norm(p, d) + pair_norm(s, d) + 1e-14);
        EXPECT_GE(pair_norm(p, d), weighted_norm(p, 2.0 - d, Component::value));
    }
}
