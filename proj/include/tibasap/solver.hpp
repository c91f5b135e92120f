#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "tibasap/bregman.hpp"
#include "tibasap/problem.hpp"
#include "tibasap/schedules.hpp"
#include "tibasap/types.hpp"

namespace tibasap {

enum class StepInit {
    /// Start each search from the previously accepted scale.
    CarryOver,
    /// Start each search from max(BB quotient, t_min).
    BarzilaiBorwein,
};

struct BacktrackingOptions {
    double rho = 2.0;
    double delta = 1e-5;
    double t_min = 1.3;
    StepInit init = StepInit::CarryOver;
    int max_doublings = 60;
};

struct SolverConfig {
    SolverConfig(BregmanGenerator x_kernel, BregmanGenerator y_kernel, ExtrapolationSchedule sched)
        : bregman_x(std::move(x_kernel)), bregman_y(std::move(y_kernel)), schedule(std::move(sched)) {}

    BregmanGenerator bregman_x;
    BregmanGenerator bregman_y;
    ExtrapolationSchedule schedule;
    double tol = 1e-4;
    long max_iter = 100000;
    std::optional<BacktrackingOptions> backtracking;
    /// Keep every z_k and hat z_k in the trace (needed by the certificates).
    bool retain_points = false;
    /// Map an infeasible extrapolated x back onto the x-block feasible set
    /// before the gate, for problems that provide restore_x. When off (or
    /// unsupported) an infeasible extrapolation evaluates to L = +inf.
    bool restore_extrapolation = true;

    void validate() const {
        require(tol > 0, ErrorCode::InvalidConfig, "tol must be positive");
        require(max_iter >= 0, ErrorCode::InvalidConfig, "max_iter must be nonnegative");
        if (backtracking) {
            require(backtracking->rho > 1, ErrorCode::InvalidConfig, "backtracking rho must exceed 1");
            require(backtracking->delta > 0, ErrorCode::InvalidConfig, "backtracking delta must be positive");
            require(backtracking->t_min > 0, ErrorCode::InvalidConfig, "backtracking t_min must be positive");
            require(backtracking->max_doublings >= 0, ErrorCode::InvalidConfig, "max_doublings must be >= 0");
        }
    }
};

/// One iteration k: z_{k+1} was computed from hat z_k.
struct TraceRow {
    long k = 0;
    double E = 0.0;     // ||x_{k+1} - x_k|| + ||y_{k+1} - y_k||
    double L_z = 0.0;   // L(z_{k+1})
    double L_hat = 0.0; // L(hat z_{k+1})
    bool accepted = false;
    double alpha = 0.0;
    double beta = 0.0;
    double t_x = 1.0;
    double t_y = 1.0;
    double elapsed = 0.0;
};

struct RunSummary {
    long iterations = 0;
    double wall_time_seconds = 0.0;
    long extrapolation_count = 0;
    bool converged = false;
    IteratePair final_point;
    double L_initial = 0.0;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    RunSummary summary;
    /// z_0 .. z_K, filled when retain_points is set.
    std::vector<IteratePair> points;
    /// hat z_0 .. hat z_{K-1}: hat_points[k] produced points[k+1].
    std::vector<IteratePair> hat_points;

    bool has_points() const { return !points.empty() && points.size() == hat_points.size() + 1; }
};

/// ||x_new - x_old|| + ||y_new - y_old||
inline double residual(const IteratePair& z_new, const IteratePair& z_old) {
    require_same_shape(z_new, z_old, "residual: iterate shapes differ");
    return (z_new.x - z_old.x).norm() + (z_new.y - z_old.y).norm();
}

/// z_new + alpha (z_new - z_cur) + beta (z_cur - z_prev), blockwise.
/// Zero weights contribute nothing, not even a signed zero.
inline IteratePair extrapolate(const IteratePair& z_new, const IteratePair& z_cur, const IteratePair& z_prev,
                               double alpha, double beta) {
    require_same_shape(z_new, z_cur, "extrapolate: z_new vs z_cur");
    require_same_shape(z_cur, z_prev, "extrapolate: z_cur vs z_prev");
    IteratePair u = z_new;
    if (alpha != 0.0) {
        u.x += alpha * (z_new.x - z_cur.x);
        u.y += alpha * (z_new.y - z_cur.y);
    }
    if (beta != 0.0) {
        u.x += beta * (z_cur.x - z_prev.x);
        u.y += beta * (z_cur.y - z_prev.y);
    }
    return u;
}

/// Accept the extrapolated point iff it does not increase L. Ties accept;
/// +inf and NaN reject.
inline bool monotone_gate(double L_extrap, double L_plain) { return L_extrap <= L_plain; }

/// max(|s'l| / s's, t_min) with s = x_new - x_old, l = grad_new - grad_old;
/// t_min when s = 0.
inline double bb_stepsize(const Vector& grad_new, const Vector& grad_old, const Vector& x_new,
                          const Vector& x_old, double t_min) {
    require(grad_new.size() == grad_old.size() && x_new.size() == x_old.size() && x_new.size() == grad_new.size(),
            ErrorCode::DimensionMismatch, "bb_stepsize operand sizes");
    const Vector s = x_new - x_old;
    const double ss = s.squaredNorm();
    if (!(ss > 0.0)) return t_min;
    const double q = std::abs(s.dot(grad_new - grad_old)) / ss;
    return std::isfinite(q) ? std::max(q, t_min) : t_min;
}

namespace detail {

inline void check_subproblem(const Vector& v, Eigen::Index expected, const char* block) {
    if (v.size() != expected || !v.allFinite())
        throw Error(ErrorCode::SubproblemFailure, std::string(block) + "-subproblem returned an invalid point");
}

// Roundoff allowance for comparisons between objective values.
inline double roundoff(double value) { return 1e-13 * (1.0 + std::abs(value)); }

} // namespace detail

/// Exact Gauss-Seidel sweep from hat z: x first, then y against the fresh x.
template <ProblemOracle P>
IteratePair alternating_step(const P& problem, const IteratePair& hat, const SolverConfig& cfg) {
    IteratePair z;
    z.x = problem.solve_x(hat.y, hat.x, problem.f_grad(hat.x), cfg.bregman_x, 1.0);
    detail::check_subproblem(z.x, problem.dim_x(), "x");
    z.y = problem.solve_y(z.x, hat.y, problem.g_grad(hat.y), cfg.bregman_y, 1.0);
    detail::check_subproblem(z.y, problem.dim_y(), "y");
    return z;
}

struct BacktrackResult {
    Vector point;
    double t = 1.0;
    int doublings = 0;
};

/**
 * x-block search: solve the x-subproblem with the kernel scaled by t and
 * grow t by rho until
 *   Q(x+, y_hat) + f(x+) <= Q(x_hat, y_hat) + f(x_hat) - delta/2 ||x+ - x_hat||^2.
 * Returns the accepted point and the scale it was solved with.
 */
template <ProblemOracle P>
BacktrackResult backtrack_x_update(const P& problem, const IteratePair& hat, double t0, const SolverConfig& cfg) {
    require(cfg.backtracking.has_value(), ErrorCode::InvalidConfig, "backtracking is not enabled");
    const BacktrackingOptions& bt = *cfg.backtracking;
    const Vector grad = problem.f_grad(hat.x);
    const double base = problem.q_value(hat.x, hat.y) + problem.f_value(hat.x);
    double t = t0;
    for (int doublings = 0; doublings <= bt.max_doublings; ++doublings) {
        Vector x = problem.solve_x(hat.y, hat.x, grad, cfg.bregman_x, t);
        detail::check_subproblem(x, problem.dim_x(), "x");
        const double lhs = problem.q_value(x, hat.y) + problem.f_value(x);
        const double rhs = base - 0.5 * bt.delta * (x - hat.x).squaredNorm();
        if (lhs <= rhs + detail::roundoff(base)) return {std::move(x), t, doublings};
        t *= bt.rho;
    }
    throw Error(ErrorCode::BacktrackDivergence, "x-block sufficient decrease not reached within the doubling budget");
}

/// Mirror of backtrack_x_update for the y-block (used when L_grad_g is unknown).
template <ProblemOracle P>
BacktrackResult backtrack_y_update(const P& problem, const Vector& x_new, const Vector& y_hat, double t0,
                                   const SolverConfig& cfg) {
    require(cfg.backtracking.has_value(), ErrorCode::InvalidConfig, "backtracking is not enabled");
    const BacktrackingOptions& bt = *cfg.backtracking;
    const Vector grad = problem.g_grad(y_hat);
    const double base = problem.q_value(x_new, y_hat) + problem.g_value(y_hat);
    double t = t0;
    for (int doublings = 0; doublings <= bt.max_doublings; ++doublings) {
        Vector y = problem.solve_y(x_new, y_hat, grad, cfg.bregman_y, t);
        detail::check_subproblem(y, problem.dim_y(), "y");
        const double lhs = problem.q_value(x_new, y) + problem.g_value(y);
        const double rhs = base - 0.5 * bt.delta * (y - y_hat).squaredNorm();
        if (lhs <= rhs + detail::roundoff(base)) return {std::move(y), t, doublings};
        t *= bt.rho;
    }
    throw Error(ErrorCode::BacktrackDivergence, "y-block sufficient decrease not reached within the doubling budget");
}

/// Runtime state of one run: the window (z_{k+1}, z_k, z_{k-1}) after each
/// shift, the current hat point and cached objective values.
struct SolverState {
    IteratePair z_cur;
    IteratePair z_prev;
    IteratePair z_prev2;
    IteratePair z_hat;
    double L_cur = 0.0;
    double L_hat = 0.0;
    long k = 0;
    long extrapolation_count = 0;

    void shift(IteratePair z_new) {
        z_prev2 = std::move(z_prev);
        z_prev = std::move(z_cur);
        z_cur = std::move(z_new);
    }
};

/**
 * Two-step inertial alternating Bregman proximal gradient loop.
 *
 * Per iteration: exact (or backtracked) block sweep from hat z_k, stopping
 * test on E_k, then the inertial point u = z_{k+1} + alpha (z_{k+1} - z_k)
 * + beta (z_k - z_{k-1}), which becomes hat z_{k+1} only if it does not
 * increase L. z_{-1} = z_{-2} = z_0. When E_k < tol the run stops before
 * the gate, so the last row never counts as an extrapolation.
 */
template <ProblemOracle P>
RunTrace run(const P& problem, const IteratePair& z0, SolverConfig cfg) {
    cfg.validate();
    require(z0.x.size() == problem.dim_x() && z0.y.size() == problem.dim_y(), ErrorCode::DimensionMismatch,
            "starting point has the wrong dimensions");
    require(cfg.bregman_x.in_domain(z0.x) && cfg.bregman_y.in_domain(z0.y), ErrorCode::DomainViolation,
            "starting point outside the kernel domains");
    const bool backtrack_x = cfg.backtracking.has_value();
    const bool backtrack_y = backtrack_x && !problem.lip_g().has_value();
    require(problem.lip_f().has_value() || backtrack_x, ErrorCode::InvalidConfig,
            "L_grad_f is unknown; enable backtracking");
    require(problem.lip_g().has_value() || backtrack_x, ErrorCode::InvalidConfig,
            "L_grad_g is unknown; enable backtracking");

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    RunTrace trace;
    SolverState st;
    st.z_cur = z0;
    st.z_prev = z0;
    st.z_prev2 = z0;
    st.z_hat = z0;
    st.L_cur = objective(problem, z0);
    st.L_hat = st.L_cur;
    require(std::isfinite(st.L_cur), ErrorCode::DomainViolation, "L is infinite at the starting point");
    trace.summary.L_initial = st.L_cur;
    if (cfg.retain_points) trace.points.push_back(z0);

    // Previous hat point and its gradient, for the BB quotient.
    std::optional<std::pair<Vector, Vector>> prev_hat_x;
    double carry_tx = backtrack_x ? cfg.backtracking->t_min : 1.0;
    double carry_ty = backtrack_y ? cfg.backtracking->t_min : 1.0;

    for (long k = 0; k < cfg.max_iter; ++k) {
        const Extrapolation w = cfg.schedule.next();
        const IteratePair& hat = st.z_hat;
        IteratePair z_new;
        double t_x = 1.0;
        double t_y = 1.0;

        if (backtrack_x) {
            double t0 = carry_tx;
            if (cfg.backtracking->init == StepInit::BarzilaiBorwein) {
                t0 = cfg.backtracking->t_min;
                if (prev_hat_x)
                    t0 = bb_stepsize(problem.f_grad(st.z_cur.x), prev_hat_x->second, st.z_cur.x,
                                     prev_hat_x->first, cfg.backtracking->t_min);
            }
            BacktrackResult bx = backtrack_x_update(problem, hat, t0, cfg);
            z_new.x = std::move(bx.point);
            t_x = carry_tx = bx.t;
            if (cfg.backtracking->init == StepInit::BarzilaiBorwein)
                prev_hat_x.emplace(hat.x, problem.f_grad(hat.x));
        } else {
            z_new.x = problem.solve_x(hat.y, hat.x, problem.f_grad(hat.x), cfg.bregman_x, 1.0);
            detail::check_subproblem(z_new.x, problem.dim_x(), "x");
        }
        if (backtrack_y) {
            BacktrackResult by = backtrack_y_update(problem, z_new.x, hat.y, carry_ty, cfg);
            z_new.y = std::move(by.point);
            t_y = carry_ty = by.t;
        } else {
            z_new.y = problem.solve_y(z_new.x, hat.y, problem.g_grad(hat.y), cfg.bregman_y, 1.0);
            detail::check_subproblem(z_new.y, problem.dim_y(), "y");
        }

        const double L_new = objective(problem, z_new);
        if (!(L_new <= st.L_hat + 1e-9 * (1.0 + std::abs(st.L_hat))))
            throw Error(ErrorCode::NonDescent, "L increased across an iteration at k=" + std::to_string(k));

        TraceRow row;
        row.k = k;
        row.E = residual(z_new, st.z_cur);
        row.L_z = L_new;
        row.alpha = w.alpha;
        row.beta = w.beta;
        row.t_x = t_x;
        row.t_y = t_y;

        if (cfg.retain_points) {
            trace.hat_points.push_back(hat);
            trace.points.push_back(z_new);
        }
        st.shift(std::move(z_new));
        st.L_cur = L_new;
        st.k = k + 1;

        if (row.E < cfg.tol) {
            st.z_hat = st.z_cur;
            st.L_hat = L_new;
            row.L_hat = L_new;
            row.elapsed = std::chrono::duration<double>(clock::now() - start).count();
            trace.rows.push_back(row);
            trace.summary.converged = true;
            break;
        }

        IteratePair u = extrapolate(st.z_cur, st.z_prev, st.z_prev2, w.alpha, w.beta);
        if constexpr (FeasibilityRestoring<P>) {
            if (cfg.restore_extrapolation) u.x = problem.restore_x(u.x, cfg.bregman_x);
        }
        double L_u = std::numeric_limits<double>::infinity();
        if (cfg.bregman_x.in_domain(u.x) && cfg.bregman_y.in_domain(u.y)) L_u = objective(problem, u);
        row.accepted = monotone_gate(L_u, L_new);
        if (row.accepted) {
            st.z_hat = std::move(u);
            st.L_hat = L_u;
            ++st.extrapolation_count;
        } else {
            st.z_hat = st.z_cur;
            st.L_hat = L_new;
        }
        cfg.schedule.report(row.accepted);
        row.L_hat = st.L_hat;
        row.elapsed = std::chrono::duration<double>(clock::now() - start).count();
        trace.rows.push_back(row);
    }

    trace.summary.iterations = static_cast<long>(trace.rows.size());
    trace.summary.extrapolation_count = st.extrapolation_count;
    trace.summary.wall_time_seconds = std::chrono::duration<double>(clock::now() - start).count();
    trace.summary.final_point = st.z_cur;
    return trace;
}

} // namespace tibasap
