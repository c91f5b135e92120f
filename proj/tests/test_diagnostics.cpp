#include <gtest/gtest.h>

#include <cmath>

#include "tibasap/diagnostics.hpp"
#include "tibasap/harness.hpp"

using namespace tibasap;

namespace {

struct QpRun {
    QpProblem problem;
    SolverConfig cfg;
    RunTrace trace;
};

QpRun euclidean_qp_run(std::uint64_t seed, harness::Algorithm alg = harness::Algorithm::Alg2) {
    harness::ExperimentConfig ec = harness::ExperimentConfig::defaults(harness::Experiment::Qp, false);
    ec.n = 40;
    ec.seed = seed;
    ec.algorithm = alg;
    ec.bregman_x = BregmanKind::SquaredEuclidean;
    QpProblem p(harness::make_qp_instance(ec));
    SolverConfig cfg = harness::make_qp_solver_config(ec, p);
    cfg.retain_points = true;
    RunTrace t = run(p, qp_random_start(p.instance(), false, seed), cfg);
    return {std::move(p), std::move(cfg), std::move(t)};
}

double rho_for(const QpRun& r) {
    return sufficient_decrease_modulus(r.cfg.bregman_x.theta(), *r.problem.lip_f(), r.cfg.bregman_y.theta(),
                                       *r.problem.lip_g());
}

double varrho_for(const QpRun& r) {
    return subgradient_modulus(*r.problem.lip_f(), r.cfg.bregman_x.eta(), *r.problem.lip_g(),
                               r.cfg.bregman_y.eta(), *r.problem.xi());
}

// A problem without grad_x q.
struct NoCross {
    Eigen::Index dim_x() const { return 1; }
    Eigen::Index dim_y() const { return 1; }
    double f_value(const Vector&) const { return 0; }
    Vector f_grad(const Vector& x) const { return Vector::Zero(x.size()); }
    double g_value(const Vector&) const { return 0; }
    Vector g_grad(const Vector& y) const { return Vector::Zero(y.size()); }
    double q_value(const Vector&, const Vector&) const { return 0; }
    std::optional<double> lip_f() const { return 1.0; }
    std::optional<double> lip_g() const { return 1.0; }
    std::optional<double> xi() const { return 1.0; }
    Vector solve_x(const Vector&, const Vector& xh, const Vector&, const BregmanGenerator&, double) const { return xh; }
    Vector solve_y(const Vector&, const Vector& yh, const Vector&, const BregmanGenerator&, double) const { return yh; }
};

} // namespace

TEST(Moduli, Formulas) {
    EXPECT_DOUBLE_EQ(sufficient_decrease_modulus(3.0, 1.0, 5.0, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(sufficient_decrease_modulus(3.0, 1.0, 3.0, 2.0), 0.5);
    // max{2 (1+2)^2, 2*4^2 + 2 (1+1)^2} = max{18, 40}
    EXPECT_DOUBLE_EQ(subgradient_modulus(1.0, 2.0, 1.0, 1.0, 4.0), std::sqrt(40.0));
}

TEST(Certificates, SufficientDecreaseHoldsOnQp) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const QpRun r = euclidean_qp_run(seed);
        ASSERT_GT(rho_for(r), 0.0);
        const CertificateReport rep = certify_sufficient_decrease(r.trace, rho_for(r));
        EXPECT_TRUE(rep.certified()) << "seed " << seed << " worst " << rep.worst_excess;
        EXPECT_EQ(rep.checked, static_cast<long>(r.trace.rows.size()));
    }
}

TEST(Certificates, SufficientDecreaseFlagsCorruptedValue) {
    QpRun r = euclidean_qp_run(4);
    ASSERT_GT(r.trace.rows.size(), 10u);
    const long bad = static_cast<long>(r.trace.rows.size()) - 3;
    r.trace.rows[bad].L_z += 1.0;
    const CertificateReport rep = certify_sufficient_decrease(r.trace, rho_for(r));
    ASSERT_EQ(rep.violations.size(), 1u);
    EXPECT_EQ(rep.violations.front(), bad);
}

TEST(Certificates, SufficientDecreasePreconditions) {
    QpRun r = euclidean_qp_run(5);
    try {
        (void)certify_sufficient_decrease(r.trace, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidModulus);
    }
    r.trace.points.clear();
    r.trace.hat_points.clear();
    try {
        (void)certify_sufficient_decrease(r.trace, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingHatPoints);
    }
}

TEST(Certificates, SubgradientBoundHoldsOnQp) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const QpRun r = euclidean_qp_run(seed, harness::Algorithm::Alg1);
        const CertificateReport rep =
            certify_subgradient_bound(r.problem, r.trace, r.cfg.bregman_x, r.cfg.bregman_y, varrho_for(r));
        EXPECT_TRUE(rep.certified()) << "seed " << seed;
        EXPECT_LE(rep.worst_excess, 0.0);
    }
}

TEST(Certificates, SubgradientVanishesOnStationaryRun) {
    QpRun r = euclidean_qp_run(6);
    for (std::size_t k = 0; k < r.trace.rows.size(); ++k) r.trace.points[k + 1] = r.trace.hat_points[k];
    const CertificateReport rep =
        certify_subgradient_bound(r.problem, r.trace, r.cfg.bregman_x, r.cfg.bregman_y, varrho_for(r), 0.0);
    EXPECT_TRUE(rep.certified());
    EXPECT_EQ(rep.worst_excess, 0.0);
}

TEST(Certificates, SubgradientFlagsInjectedFault) {
    QpRun r = euclidean_qp_run(7);
    ASSERT_GT(r.trace.rows.size(), 20u);
    // For the QP every term of (p_x, p_y) is linear in z_{k+1} - hat z_k, so
    // moving an iterate cannot break the bound; corrupt a recorded scale.
    r.trace.rows[12].t_x = 1e6;
    const CertificateReport rep =
        certify_subgradient_bound(r.problem, r.trace, r.cfg.bregman_x, r.cfg.bregman_y, varrho_for(r));
    ASSERT_EQ(rep.violations.size(), 1u);
    EXPECT_EQ(rep.violations.front(), 12);
}

TEST(Certificates, MissingCrossGradient) {
    RunTrace t;
    const auto g = BregmanGenerator::squared_euclidean(1.0);
    try {
        (void)certify_subgradient_bound(NoCross{}, t, g, g, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingOracle);
    }
}

TEST(DescentChain, CleanAndCorrupted) {
    QpRun r = euclidean_qp_run(8);
    EXPECT_TRUE(descent_chain_violations(r.trace).empty());
    r.trace.rows[5].L_hat = r.trace.rows[5].L_z + 1.0;
    EXPECT_FALSE(descent_chain_violations(r.trace).empty());
}
