#pragma once

#include <concepts>
#include <limits>
#include <optional>

#include "tibasap/bregman.hpp"
#include "tibasap/types.hpp"

namespace tibasap {

/**
 * Oracle bundle for L(x, y) = f(x) + Q(x, y) + g(y).
 *
 * q_value returns +infinity outside dom Q. solve_x / solve_y return the
 * exact minimizers of the two block subproblems
 *
 *   x+ = argmin_x Q(x, y_hat) + <grad f(x_hat), x> + scale * D_phi1(x, x_hat)
 *   y+ = argmin_y Q(x+, y)    + <grad g(y_hat), y> + scale * D_phi2(y, y_hat)
 *
 * where `scale` is 1 unless a backtracking search is driving it.
 * lip_f / lip_g / xi return nullopt when the constant is unknown.
 */
template <class P>
concept ProblemOracle = requires(const P& p, const Vector& v, const BregmanGenerator& gen, double s) {
    { p.dim_x() } -> std::convertible_to<Eigen::Index>;
    { p.dim_y() } -> std::convertible_to<Eigen::Index>;
    { p.f_value(v) } -> std::convertible_to<double>;
    { p.f_grad(v) } -> std::convertible_to<Vector>;
    { p.g_value(v) } -> std::convertible_to<double>;
    { p.g_grad(v) } -> std::convertible_to<Vector>;
    { p.q_value(v, v) } -> std::convertible_to<double>;
    { p.lip_f() } -> std::same_as<std::optional<double>>;
    { p.lip_g() } -> std::same_as<std::optional<double>>;
    { p.xi() } -> std::same_as<std::optional<double>>;
    { p.solve_x(v, v, v, gen, s) } -> std::convertible_to<Vector>;
    { p.solve_y(v, v, v, gen, s) } -> std::convertible_to<Vector>;
};

/// Problems that also expose grad_x q for the split Q = q + h(x).
template <class P>
concept CrossGradientOracle = ProblemOracle<P> && requires(const P& p, const Vector& v) {
    { p.q_grad_x(v, v) } -> std::convertible_to<Vector>;
};

/// Problems that can map an x outside the feasible set of the x-block back
/// to its nearest feasible point (used on extrapolated points).
template <class P>
concept FeasibilityRestoring = ProblemOracle<P> && requires(const P& p, const Vector& v, const BregmanGenerator& gen) {
    { p.restore_x(v, gen) } -> std::convertible_to<Vector>;
};

/// L(x, y); +infinity outside dom Q.
template <ProblemOracle P>
double objective(const P& problem, const Vector& x, const Vector& y) {
    const double q = problem.q_value(x, y);
    if (!std::isfinite(q)) return std::numeric_limits<double>::infinity();
    return problem.f_value(x) + q + problem.g_value(y);
}

template <ProblemOracle P>
double objective(const P& problem, const IteratePair& z) {
    return objective(problem, z.x, z.y);
}

} // namespace tibasap
