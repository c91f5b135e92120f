#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>

#include "tibasap/bregman.hpp"
#include "tibasap/problem.hpp"
#include "tibasap/problems/capped_l1.hpp"
#include "tibasap/problems/qp.hpp"

namespace tibasap {

/// Capped-l1 logistic regression split as
///   f(x) = 1/n sum log(1 + exp(-b_i a_i'x)),  g = 0,
///   Q(x, y) = lambda sum min(|y_j|, theta) + mu/2 ||x - y||^2.
struct LogRegInstance {
    Matrix samples; // n x d, rows a_i
    Vector labels;  // entries in {-1, +1}
    double lambda = 1e-3;
    double theta_cap = 1e-4;
    double mu = 1.0;
    std::uint64_t seed = 0;

    Eigen::Index n() const { return samples.rows(); }
    Eigen::Index d() const { return samples.cols(); }
};

struct LogRegOptions {
    double lambda = 1e-3;
    double theta_cap = 1e-4;
    double mu = 1.0;
    double label_flip_rate = 0.05;
    /// Norm of the planted weight vector; sets the typical margin size.
    double planted_norm = 1.0;
};

/// Standard normal features; labels are drawn from a planted logistic model
/// P(b = 1) = sigmoid(a'w) and a fraction of them is then flipped.
inline LogRegInstance gen_logreg(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                                 const LogRegOptions& opt = {}) {
    require(n >= 1 && d >= 1, ErrorCode::InvalidConfig, "logistic dimensions must be positive");
    require(opt.lambda > 0 && opt.theta_cap > 0 && opt.mu > 0, ErrorCode::InvalidConfig,
            "lambda, theta and mu must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    LogRegInstance inst;
    inst.samples.resize(n, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < n; ++i) inst.samples(i, j) = normal(rng);
    Vector planted(d);
    for (Eigen::Index j = 0; j < d; ++j) planted[j] = normal(rng);
    planted *= opt.planted_norm / planted.norm();

    const Vector margin = inst.samples * planted;
    inst.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double label = unif(rng) < 1.0 / (1.0 + std::exp(-margin[i])) ? 1.0 : -1.0;
        if (unif(rng) < opt.label_flip_rate) label = -label;
        inst.labels[i] = label;
    }
    inst.lambda = opt.lambda;
    inst.theta_cap = opt.theta_cap;
    inst.mu = opt.mu;
    inst.seed = seed;
    return inst;
}

namespace detail {

inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace detail

/// f(x) and grad f(x) = -(1/n) sum b_i a_i sigmoid(-b_i a_i'x).
inline std::pair<double, Vector> logistic_value_grad(const LogRegInstance& inst, const Vector& x) {
    require(x.size() == inst.d(), ErrorCode::DimensionMismatch, "logistic weight size");
    const Vector m = inst.labels.cwiseProduct(inst.samples * x);
    double value = 0.0;
    Vector weights(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        value += detail::softplus(-m[i]);
        weights[i] = inst.labels[i] * detail::sigmoid(-m[i]);
    }
    const double inv_n = 1.0 / static_cast<double>(inst.n());
    return {value * inv_n, -inv_n * (inst.samples.transpose() * weights)};
}

inline double logistic_value(const LogRegInstance& inst, const Vector& x) {
    require(x.size() == inst.d(), ErrorCode::DimensionMismatch, "logistic weight size");
    const Vector m = inst.labels.cwiseProduct(inst.samples * x);
    double value = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) value += detail::softplus(-m[i]);
    return value / static_cast<double>(inst.n());
}

/// Global curvature bound ||A' diag(b)||^2 / (4n) of the logistic loss.
inline double logistic_curvature_bound(const LogRegInstance& inst) {
    const Matrix scaled = inst.labels.asDiagonal() * inst.samples;
    Eigen::JacobiSVD<Matrix> svd(scaled);
    const double s = svd.singularValues()[0];
    return s * s / (4.0 * static_cast<double>(inst.n()));
}

/**
 * x-update: argmin (mu/2)||x - y_hat||^2 + <grad_f_hat, x> + scale * D_phi1(x, x_hat).
 * Squared Euclidean has the weighted-average closed form; Itakura-Saito is
 * the positive root of
 *   mu x^2 + (scale*gamma/x_hat_i + grad_i - mu*y_hat_i) x - scale*gamma = 0
 * per coordinate, clamped at the floor (the exact minimizer over x >= floor).
 */
inline Vector logreg_solve_x(const LogRegInstance& inst, const Vector& y_hat, const Vector& x_hat,
                             const Vector& grad_f_hat, const BregmanGenerator& gen, double scale = 1.0) {
    require(y_hat.size() == inst.d() && x_hat.size() == inst.d() && grad_f_hat.size() == inst.d(),
            ErrorCode::DimensionMismatch, "logistic x-update operand size");
    require(scale > 0, ErrorCode::InvalidConfig, "subproblem scale must be positive");
    const double mu = inst.mu;
    const double sg = scale * gen.gamma();
    if (gen.is_euclidean()) return (mu * y_hat + sg * x_hat - grad_f_hat) / (mu + sg);

    require(gen.in_domain(x_hat), ErrorCode::DomainViolation,
            "logistic x-update: x_hat below the Itakura-Saito floor");
    Vector x(x_hat.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double root = detail::positive_root(mu, sg / x_hat[i] + grad_f_hat[i] - mu * y_hat[i], sg);
        x[i] = std::max(gen.domain_floor(), root);
    }
    return x;
}

/// y-update with phi2 = (eta/2)||.||^2: capped-l1 prox at
/// u = (eta y_hat + mu x+) / (mu + eta) with weight lambda / (mu + eta).
inline Vector logreg_solve_y(const LogRegInstance& inst, const Vector& x_new, const Vector& y_hat,
                             const BregmanGenerator& gen, double scale = 1.0) {
    require(gen.is_euclidean(), ErrorCode::UnsupportedGenerator,
            "logistic y-update needs a squared Euclidean kernel");
    require(x_new.size() == inst.d() && y_hat.size() == inst.d(), ErrorCode::DimensionMismatch,
            "logistic y-update operand size");
    const double eta = scale * gen.gamma();
    const double t = inst.mu + eta;
    const Vector u = (eta * y_hat + inst.mu * x_new) / t;
    return capped_l1_prox(u, inst.lambda / t, inst.theta_cap);
}

class LogRegProblem {
public:
    explicit LogRegProblem(LogRegInstance inst) : inst_(std::move(inst)) {}

    const LogRegInstance& instance() const { return inst_; }

    Eigen::Index dim_x() const { return inst_.d(); }
    Eigen::Index dim_y() const { return inst_.d(); }

    double f_value(const Vector& x) const { return logistic_value(inst_, x); }
    Vector f_grad(const Vector& x) const { return logistic_value_grad(inst_, x).second; }
    double g_value(const Vector&) const { return 0.0; }
    Vector g_grad(const Vector& y) const { return Vector::Zero(y.size()); }

    double q_value(const Vector& x, const Vector& y) const {
        if (!x.allFinite() || !y.allFinite()) return std::numeric_limits<double>::infinity();
        double penalty = 0.0;
        for (Eigen::Index j = 0; j < y.size(); ++j) penalty += std::min(std::abs(y[j]), inst_.theta_cap);
        return inst_.lambda * penalty + 0.5 * inst_.mu * (x - y).squaredNorm();
    }
    Vector q_grad_x(const Vector& x, const Vector& y) const { return inst_.mu * (x - y); }

    /// Treated as unknown: runs on this problem must backtrack.
    std::optional<double> lip_f() const { return std::nullopt; }
    std::optional<double> lip_g() const { return 0.0; }
    std::optional<double> xi() const { return inst_.mu; }

    /// Itakura-Saito runs live on {x >= floor}; extrapolated points are
    /// projected onto that box. Euclidean runs are unconstrained.
    Vector restore_x(const Vector& x, const BregmanGenerator& gen) const {
        if (gen.is_euclidean() || gen.in_domain(x)) return x;
        return x.cwiseMax(gen.domain_floor());
    }

    Vector solve_x(const Vector& y_hat, const Vector& x_hat, const Vector& grad_f_hat,
                   const BregmanGenerator& gen, double scale) const {
        return logreg_solve_x(inst_, y_hat, x_hat, grad_f_hat, gen, scale);
    }
    Vector solve_y(const Vector& x_new, const Vector& y_hat, const Vector&, const BregmanGenerator& gen,
                   double scale) const {
        return logreg_solve_y(inst_, x_new, y_hat, gen, scale);
    }

private:
    LogRegInstance inst_;
};

/// Random start with x0 = y0; positive coordinates when `positive` is set.
inline IteratePair logreg_random_start(const LogRegInstance& inst, bool positive, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(inst.d());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double v = 0.1 * normal(rng);
        x[j] = positive ? std::abs(v) + 0.01 : v;
    }
    return {x, x};
}

} // namespace tibasap
