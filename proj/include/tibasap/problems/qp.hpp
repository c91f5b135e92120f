#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>

#include "tibasap/bregman.hpp"
#include "tibasap/problem.hpp"

namespace tibasap {

/// Penalized ball-constrained QP
///   min 1/2 y'Ay + b'y + indicator_S(x) + mu/2 ||x - y||^2,  S = {||x|| <= radius}.
struct QpInstance {
    Matrix A;
    Vector b;
    double radius = 2.0;
    double mu = 1.0;
    std::uint64_t seed = 0;

    Eigen::Index n() const { return b.size(); }
};

/// Spectral norm of a symmetric matrix (= Lipschitz constant of y -> Ay + b).
inline double symmetric_spectral_norm(const Matrix& A) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// A = D + D' and b with i.i.d. standard normal D, b. The penalty defaults to
/// 10 * ||A||_2.
inline QpInstance gen_qp(Eigen::Index n, double radius, std::uint64_t seed,
                         std::optional<double> mu = std::nullopt) {
    require(n >= 1, ErrorCode::InvalidConfig, "QP dimension must be positive");
    require(radius > 0, ErrorCode::InvalidConfig, "ball radius must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix D(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) D(i, j) = normal(rng);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = normal(rng);

    QpInstance inst;
    inst.A = D + D.transpose();
    inst.b = std::move(b);
    inst.radius = radius;
    inst.seed = seed;
    if (mu) {
        require(*mu > 0, ErrorCode::InvalidConfig, "penalty mu must be positive");
        inst.mu = *mu;
    } else {
        inst.mu = 10.0 * std::max(symmetric_spectral_norm(inst.A), 1.0);
    }
    return inst;
}

inline bool in_ball(const Vector& x, double radius) {
    return x.allFinite() && x.norm() <= radius * (1.0 + 1e-12);
}

/// Closed-form y-update for phi2 = (lambda/2)||.||^2:
///   y = (mu x+ + lambda y_hat - A y_hat - b) / (mu + lambda).
inline Vector qp_solve_y(const QpInstance& inst, const Vector& x_new, const Vector& y_hat,
                         const BregmanGenerator& gen, double scale = 1.0) {
    require(gen.is_euclidean(), ErrorCode::UnsupportedGenerator, "QP y-update needs a squared Euclidean kernel");
    require(x_new.size() == inst.n() && y_hat.size() == inst.n(), ErrorCode::DimensionMismatch,
            "QP y-update operand size");
    const double lambda = scale * gen.gamma();
    Vector rhs = inst.mu * x_new + lambda * y_hat - inst.A * y_hat - inst.b;
    return rhs / (inst.mu + lambda);
}

namespace detail {

// Positive root of a x^2 + b x - c = 0 with a, c > 0, free of cancellation.
inline double positive_root(double a, double b, double c) {
    const double disc = std::sqrt(b * b + 4.0 * a * c);
    return b >= 0.0 ? 2.0 * c / (b + disc) : (disc - b) / (2.0 * a);
}

} // namespace detail

/**
 * x-update over S: argmin (mu/2)||x - y_hat||^2 + scale * D_phi1(x, x_hat).
 *
 * Squared Euclidean: radial projection of the weighted average of y_hat and
 * x_hat. Itakura-Saito: the feasible set is S intersected with {x >= floor};
 * for a ball multiplier nu >= 0 each coordinate is the positive root of
 *   (mu + nu) x^2 + (scale*gamma/x_hat_i - mu*y_hat_i) x - scale*gamma = 0
 * clamped at the floor, and nu is bisected until ||x(nu)|| meets the radius.
 */
inline Vector qp_solve_x(const QpInstance& inst, const Vector& y_hat, const Vector& x_hat,
                         const BregmanGenerator& gen, double scale = 1.0) {
    require(y_hat.size() == inst.n() && x_hat.size() == inst.n(), ErrorCode::DimensionMismatch,
            "QP x-update operand size");
    require(scale > 0, ErrorCode::InvalidConfig, "subproblem scale must be positive");
    const double mu = inst.mu;
    const double r = inst.radius;
    const double sg = scale * gen.gamma();

    if (gen.is_euclidean()) {
        Vector x = (mu * y_hat + sg * x_hat) / (mu + sg);
        const double nrm = x.norm();
        if (nrm > r) x *= r / nrm;
        return x;
    }

    require(gen.in_domain(x_hat), ErrorCode::DomainViolation, "QP x-update: x_hat below the Itakura-Saito floor");
    const double floor = gen.domain_floor();
    const Vector lin = sg * x_hat.cwiseInverse() - mu * y_hat;
    auto x_of = [&](double nu) {
        Vector x(lin.size());
        for (Eigen::Index i = 0; i < lin.size(); ++i)
            x[i] = std::max(floor, detail::positive_root(mu + nu, lin[i], sg));
        return x;
    };

    Vector x = x_of(0.0);
    if (x.norm() <= r) return x;

    constexpr int max_steps = 200;
    int steps = 0;
    double lo = 0.0;
    double hi = mu;
    while (x_of(hi).norm() > r) {
        lo = hi;
        hi *= 2.0;
        if (++steps >= max_steps || !std::isfinite(hi))
            throw Error(ErrorCode::BisectionFailure, "QP x-update: could not bracket the ball multiplier");
    }
    for (; steps < max_steps; ++steps) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (x_of(mid).norm() > r)
            lo = mid;
        else
            hi = mid;
    }
    return x_of(hi);
}

/// Problem oracle view of a QpInstance: f = 0, g(y) = 1/2 y'Ay + b'y,
/// Q(x, y) = indicator_S(x) + mu/2 ||x - y||^2.
class QpProblem {
public:
    explicit QpProblem(QpInstance inst)
        : inst_(std::move(inst)), lip_g_(symmetric_spectral_norm(inst_.A)) {}

    const QpInstance& instance() const { return inst_; }

    Eigen::Index dim_x() const { return inst_.n(); }
    Eigen::Index dim_y() const { return inst_.n(); }

    double f_value(const Vector&) const { return 0.0; }
    Vector f_grad(const Vector& x) const { return Vector::Zero(x.size()); }
    double g_value(const Vector& y) const { return 0.5 * y.dot(inst_.A * y) + inst_.b.dot(y); }
    Vector g_grad(const Vector& y) const { return inst_.A * y + inst_.b; }

    double q_value(const Vector& x, const Vector& y) const {
        if (!in_ball(x, inst_.radius)) return std::numeric_limits<double>::infinity();
        return 0.5 * inst_.mu * (x - y).squaredNorm();
    }
    Vector q_grad_x(const Vector& x, const Vector& y) const { return inst_.mu * (x - y); }

    /// Nearest point of S (intersected with {x >= floor} for Itakura-Saito).
    /// Points already feasible are returned unchanged.
    Vector restore_x(const Vector& x, const BregmanGenerator& gen) const {
        const double r = inst_.radius;
        if (in_ball(x, r) && gen.in_domain(x)) return x;
        Vector out = gen.is_euclidean() ? x : x.cwiseMax(gen.domain_floor());
        const double nrm = out.norm();
        if (nrm > r) out *= r / nrm;
        if (!gen.is_euclidean()) out = out.cwiseMax(gen.domain_floor());
        return out;
    }

    /// f vanishes, so any positive constant bounds grad f; it is tied to
    /// L_grad_g so both kernels get the same sizing.
    std::optional<double> lip_f() const { return lip_g_; }
    std::optional<double> lip_g() const { return lip_g_; }
    std::optional<double> xi() const { return inst_.mu; }

    Vector solve_x(const Vector& y_hat, const Vector& x_hat, const Vector&, const BregmanGenerator& gen,
                   double scale) const {
        return qp_solve_x(inst_, y_hat, x_hat, gen, scale);
    }
    Vector solve_y(const Vector& x_new, const Vector& y_hat, const Vector&, const BregmanGenerator& gen,
                   double scale) const {
        return qp_solve_y(inst_, x_new, y_hat, gen, scale);
    }

private:
    QpInstance inst_;
    double lip_g_;
};

/// Random starting point inside S with x0 = y0; drawn from the positive
/// orthant (above `floor`) when `positive` is set.
inline IteratePair qp_random_start(const QpInstance& inst, bool positive, std::uint64_t seed,
                                   double floor = 1e-6) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    Vector x(inst.n());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double v = normal(rng);
        x[i] = positive ? std::abs(v) + 0.1 : v;
    }
    x *= unif(rng) * inst.radius / x.norm();
    if (positive) x = x.cwiseMax(2.0 * floor);
    return {x, x};
}

} // namespace tibasap
