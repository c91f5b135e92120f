#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tibasap/bregman.hpp"
#include "tibasap/oracles.hpp"

using namespace tibasap;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

} // namespace

TEST(Bregman, EuclideanValueGradientDistance) {
    const auto g2 = BregmanGenerator::squared_euclidean(2.0);
    EXPECT_DOUBLE_EQ(g2.value(vec({1, 1})), 2.0);
    const auto g1 = BregmanGenerator::squared_euclidean(1.0);
    EXPECT_EQ(g1.gradient(vec({3, -2})), vec({3, -2}));
    const auto g3 = BregmanGenerator::squared_euclidean(3.0);
    EXPECT_DOUBLE_EQ(g3.distance(vec({1, 0}), vec({0, 0})), 1.5);
    EXPECT_EQ(g3.theta(), 3.0);
    EXPECT_EQ(g3.eta(), 3.0);
}

TEST(Bregman, ItakuraSaitoValues) {
    const auto g = BregmanGenerator::itakura_saito(1.0);
    EXPECT_DOUBLE_EQ(g.value(vec({1, 1, 1})), 0.0);
    EXPECT_DOUBLE_EQ(g.value(vec({std::exp(1.0)})), -1.0);
    EXPECT_EQ(g.gradient(vec({1, 2})), vec({-1, -0.5}));
    EXPECT_DOUBLE_EQ(g.distance(vec({0.5, 2}), vec({0.5, 2})), 0.0);
    EXPECT_NEAR(g.distance(vec({2}), vec({1})), 0.3068528194400546, 1e-15);
    // two coordinates with ratios 6 and 1/8
    EXPECT_NEAR(g.distance(vec({3, 0.25}), vec({0.5, 2})), 4.41268207245178093, 1e-13);
}

TEST(Bregman, ItakuraSaitoWorkingBox) {
    const auto g = BregmanGenerator::itakura_saito(2.0, 0.1, 4.0);
    EXPECT_DOUBLE_EQ(g.theta(), 2.0 / 16.0);
    EXPECT_DOUBLE_EQ(g.eta(), 2.0 / 0.01);
    EXPECT_GE(g.eta(), g.theta());
    EXPECT_EQ(g.domain_floor(), 0.1);
}

TEST(Bregman, SizedForMeetsModulus) {
    const auto e = BregmanGenerator::sized_for(BregmanKind::SquaredEuclidean, 5.0);
    EXPECT_DOUBLE_EQ(e.theta(), 5.5);
    const auto is = BregmanGenerator::sized_for(BregmanKind::ItakuraSaito, 5.0, 1.1, 1e-6, 2.0);
    EXPECT_NEAR(is.theta(), 5.5, 1e-12);
}

TEST(Bregman, RejectsBelowFloor) {
    const auto g = BregmanGenerator::itakura_saito(1.0, 1e-3, 1.0);
    try {
        (void)g.distance(vec({1e-4}), vec({1}));
        FAIL() << "expected DomainViolation";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainViolation);
    }
    EXPECT_THROW((void)g.value(vec({-1.0})), Error);
    EXPECT_THROW((void)g.gradient(vec({0.0})), Error);
    EXPECT_FALSE(g.in_domain(vec({0.5, 1e-4})));
    EXPECT_TRUE(g.in_domain(vec({0.5, 1e-3})));
}

TEST(Bregman, InvalidParameters) {
    EXPECT_THROW((void)BregmanGenerator::squared_euclidean(0.0), Error);
    EXPECT_THROW((void)BregmanGenerator::itakura_saito(1.0, 2.0, 1.0), Error);
    EXPECT_THROW((void)BregmanGenerator::sized_for(BregmanKind::ItakuraSaito, -1.0), Error);
}

TEST(Bregman, StrongConvexityLowerBound) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> box(0.05, 3.0);
    const auto is = BregmanGenerator::itakura_saito(0.7, 0.05, 3.0);
    const auto eu = BregmanGenerator::squared_euclidean(0.7);
    for (int trial = 0; trial < 200; ++trial) {
        Vector x(5), y(5);
        for (int i = 0; i < 5; ++i) {
            x[i] = box(rng);
            y[i] = box(rng);
        }
        for (const auto* g : {&is, &eu})
            EXPECT_GE(g->distance(x, y), 0.5 * g->theta() * (x - y).squaredNorm() - 1e-10);
    }
}

TEST(Bregman, DistanceMatchesDefinition) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> box(0.1, 2.0);
    for (const auto& g : {BregmanGenerator::itakura_saito(1.3, 0.1, 2.0), BregmanGenerator::squared_euclidean(0.4)}) {
        for (int trial = 0; trial < 100; ++trial) {
            Vector x(4), y(4);
            for (int i = 0; i < 4; ++i) {
                x[i] = box(rng);
                y[i] = box(rng);
            }
            const double from_def = g.value(x) - g.value(y) - g.gradient(y).dot(x - y);
            const double closed = g.distance(x, y);
            EXPECT_NEAR(from_def, closed, 1e-12 * std::max(1.0, std::abs(closed)) + 1e-13);
        }
    }
}

TEST(Bregman, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> box(0.2, 2.0);
    for (const auto& g : {BregmanGenerator::itakura_saito(1.0, 1e-6, 2.0), BregmanGenerator::squared_euclidean(2.5)}) {
        for (int trial = 0; trial < 50; ++trial) {
            Vector x(6);
            for (int i = 0; i < 6; ++i) x[i] = box(rng);
            const Vector fd = oracles::fd_gradient([&](const Vector& v) { return g.value(v); }, x);
            const Vector an = g.gradient(x);
            EXPECT_LE((fd - an).norm(), 1e-5 * an.norm());
        }
    }
}
