#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tibasap/bregman.hpp"
#include "tibasap/problem.hpp"
#include "tibasap/solver.hpp"

namespace tibasap {

/// Result of replaying a trace against a per-iteration inequality.
struct CertificateReport {
    /// Iteration indices k whose inequality failed.
    std::vector<long> violations;
    /// Largest (lhs - rhs) seen; <= 0 means every inequality held without slack.
    double worst_excess = -std::numeric_limits<double>::infinity();
    long checked = 0;

    bool certified() const { return violations.empty(); }
};

/// rho = min{(theta1 - L_f)/2, (theta2 - L_g)/2}
inline double sufficient_decrease_modulus(double theta1, double lip_f, double theta2, double lip_g) {
    return std::min(0.5 * (theta1 - lip_f), 0.5 * (theta2 - lip_g));
}

/// varrho = sqrt(max{2 (L_f + eta1)^2, 2 xi^2 + 2 (L_g + eta2)^2})
inline double subgradient_modulus(double lip_f, double eta1, double lip_g, double eta2, double xi) {
    const double a = 2.0 * (lip_f + eta1) * (lip_f + eta1);
    const double b = 2.0 * xi * xi + 2.0 * (lip_g + eta2) * (lip_g + eta2);
    return std::sqrt(std::max(a, b));
}

/**
 * Checks L(z_{k+1}) <= L(z_k) - rho ||z_{k+1} - hat z_k||^2 + tol_cert on
 * every recorded iteration, using the trace's L values and retained points.
 * A negative tol_cert selects the default 1e-8 (1 + |L(z_0)|).
 */
inline CertificateReport certify_sufficient_decrease(const RunTrace& trace, double rho_const,
                                                     double tol_cert = -1.0) {
    require(rho_const > 0.0, ErrorCode::InvalidModulus, "sufficient-decrease modulus must be positive");
    require(trace.rows.empty() || trace.has_points(), ErrorCode::MissingHatPoints,
            "trace was recorded without retained points");
    require(trace.points.size() == trace.rows.size() + 1 || trace.rows.empty(), ErrorCode::MissingHatPoints,
            "retained points do not match the trace rows");
    if (tol_cert < 0.0) tol_cert = 1e-8 * (1.0 + std::abs(trace.summary.L_initial));

    CertificateReport report;
    double L_prev = trace.summary.L_initial;
    for (std::size_t k = 0; k < trace.rows.size(); ++k) {
        const double L_next = trace.rows[k].L_z;
        const double step = squared_distance(trace.points[k + 1], trace.hat_points[k]);
        const double excess = L_next - (L_prev - rho_const * step);
        report.worst_excess = std::max(report.worst_excess, excess);
        if (excess > tol_cert) report.violations.push_back(static_cast<long>(k));
        ++report.checked;
        L_prev = L_next;
    }
    return report;
}

/**
 * Rebuilds the subgradient (p_x, p_y) of L at z_{k+1},
 *   p_x = grad_x q(x+, y+) - grad_x q(x+, y_hat) + grad f(x+) - grad f(x_hat)
 *         - t_x (grad phi1(x+) - grad phi1(x_hat)),
 *   p_y = grad g(y+) - grad g(y_hat) - t_y (grad phi2(y+) - grad phi2(y_hat)),
 * and checks ||(p_x, p_y)|| <= varrho ||z_{k+1} - hat z_k|| + tol_cert.
 * t_x, t_y are the kernel scales recorded in the trace (1 without backtracking).
 */
template <ProblemOracle P>
CertificateReport certify_subgradient_bound(const P& problem, const RunTrace& trace, const BregmanGenerator& phi1,
                                            const BregmanGenerator& phi2, double varrho, double tol_cert = 1e-8) {
    if constexpr (!CrossGradientOracle<P>) {
        throw Error(ErrorCode::MissingOracle, "problem does not expose grad_x q");
    } else {
        require(varrho > 0.0, ErrorCode::InvalidModulus, "subgradient modulus must be positive");
        require(trace.rows.empty() || trace.has_points(), ErrorCode::MissingHatPoints,
                "trace was recorded without retained points");
        CertificateReport report;
        for (std::size_t k = 0; k < trace.rows.size(); ++k) {
            const IteratePair& z = trace.points[k + 1];
            const IteratePair& hat = trace.hat_points[k];
            const TraceRow& row = trace.rows[k];
            const Vector px = problem.q_grad_x(z.x, z.y) - problem.q_grad_x(z.x, hat.y) + problem.f_grad(z.x) -
                              problem.f_grad(hat.x) - row.t_x * (phi1.gradient(z.x) - phi1.gradient(hat.x));
            const Vector py = problem.g_grad(z.y) - problem.g_grad(hat.y) -
                              row.t_y * (phi2.gradient(z.y) - phi2.gradient(hat.y));
            const double lhs = std::sqrt(px.squaredNorm() + py.squaredNorm());
            const double rhs = varrho * std::sqrt(squared_distance(z, hat));
            const double excess = lhs - rhs;
            report.worst_excess = std::max(report.worst_excess, excess);
            if (excess > tol_cert * (1.0 + rhs)) report.violations.push_back(static_cast<long>(k));
            ++report.checked;
        }
        return report;
    }
}

/// Replays L(z_{k+1}) <= L(hat z_k) <= L(z_k) (relative slack) on a trace.
inline std::vector<long> descent_chain_violations(const RunTrace& trace, double rel_slack = 1e-9) {
    std::vector<long> bad;
    double L_prev = trace.summary.L_initial;
    double L_hat_prev = trace.summary.L_initial;
    for (const TraceRow& row : trace.rows) {
        const double slack = rel_slack * (1.0 + std::abs(L_prev));
        if (row.L_z > L_hat_prev + slack || L_hat_prev > L_prev + slack || row.L_hat > row.L_z + slack)
            bad.push_back(row.k);
        L_prev = row.L_z;
        L_hat_prev = row.L_hat;
    }
    return bad;
}

} // namespace tibasap
