#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tibasap/oracles.hpp"
#include "tibasap/problems/capped_l1.hpp"

using namespace tibasap;

TEST(CappedL1, ZeroInputStaysAtZero) {
    EXPECT_EQ(capped_l1_prox_scalar(0.0, 0.5, 1.0), 0.0);
}

TEST(CappedL1, ZeroWeightIsIdentity) {
    Vector u(4);
    u << -2.0, -1e-5, 0.3, 7.0;
    EXPECT_EQ(capped_l1_prox(u, 0.0, 0.1), u);
}

TEST(CappedL1, RegionCases) {
    // Far outside the cap: the flat region wins, no shrinkage.
    EXPECT_DOUBLE_EQ(capped_l1_prox_scalar(3.0, 0.5, 1.0), 3.0);
    // Inside: soft threshold.
    EXPECT_DOUBLE_EQ(capped_l1_prox_scalar(0.8, 0.5, 1.0), 0.3);
    EXPECT_DOUBLE_EQ(capped_l1_prox_scalar(-0.8, 0.5, 1.0), -0.3);
    EXPECT_EQ(capped_l1_prox_scalar(0.4, 0.5, 1.0), 0.0);
}

TEST(CappedL1, TieTakesSmallerMagnitude) {
    // u = 1, w = 1, theta = 0.5: outer y = 1 costs 0.5, inner y = 0 costs 0.5.
    EXPECT_EQ(capped_l1_prox_scalar(1.0, 1.0, 0.5), 0.0);
}

TEST(CappedL1, RejectsBadParameters) {
    Vector u = Vector::Ones(2);
    EXPECT_THROW((void)capped_l1_prox(u, -1.0, 1.0), Error);
    EXPECT_THROW((void)capped_l1_prox(u, 1.0, 0.0), Error);
}

TEST(CappedL1, MatchesGridOracle) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ud(-3.0, 3.0);
    std::uniform_real_distribution<double> wd(0.0, 1.0);
    std::uniform_real_distribution<double> td(0.0, 2.0);
    constexpr double step = 1e-4;
    for (int trial = 0; trial < 2000; ++trial) {
        const double u = ud(rng);
        const double w = 1.0 - wd(rng);
        const double theta = 2.0 - td(rng);
        auto h = [&](double y) { return capped_l1_scalar_objective(y, u, w, theta); };
        const oracles::GridSpec grid{step * std::floor((u - w) / step) - step, u + w + 2 * step, step};
        const auto [y_grid, h_grid] = oracles::grid_argmin_1d(h, grid);
        const double y = capped_l1_prox_scalar(u, w, theta);
        EXPECT_LT(h(y) - h_grid, 1e-7) << "u=" << u << " w=" << w << " theta=" << theta;
        EXPECT_LE(std::abs(y - u), w + 1e-15);
    }
}
