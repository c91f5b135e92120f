#pragma once

// Brute-force and finite-difference checks used to validate the closed-form
// steps. Depends on Eigen only; never on the solver or problem code.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>

#include <Eigen/Dense>

#include "tibasap/error.hpp"

namespace tibasap::oracles {

struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    double step = 1e-3;

    long points() const {
        require(lo < hi && step > 0, ErrorCode::InvalidConfig, "grid needs lo < hi and step > 0");
        const double count = std::floor((hi - lo) / step);
        if (count > 1e7) throw Error(ErrorCode::BudgetExceeded, "grid has more than 1e7 cells");
        return static_cast<long>(count) + 1;
    }
};

/// (argmin, min) over lo + i*step; the first minimum wins ties.
inline std::pair<double, double> grid_argmin_1d(const std::function<double(double)>& objective,
                                                const GridSpec& grid) {
    const long n = grid.points();
    double best_x = grid.lo;
    double best_v = objective(grid.lo);
    for (long i = 1; i < n; ++i) {
        const double x = grid.lo + static_cast<double>(i) * grid.step;
        const double v = objective(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return {best_x, best_v};
}

/// Central differences with per-coordinate step h * (1 + |x_i|).
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& value,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double hi = h * (1.0 + std::abs(x[i]));
        probe[i] = x[i] + hi;
        const double up = value(probe);
        probe[i] = x[i] - hi;
        const double down = value(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * hi);
    }
    return grad;
}

/// True iff no feasible Gaussian perturbation of `candidate` (scaled by
/// `magnitude`) lowers the objective by more than `improvement_tol`.
inline bool perturbation_optimality(const std::function<double(const Eigen::VectorXd&)>& objective,
                                    const Eigen::VectorXd& candidate,
                                    const std::function<bool(const Eigen::VectorXd&)>& feasible, int trials,
                                    double magnitude, std::uint64_t seed, double improvement_tol = 1e-9) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double base = objective(candidate);
    Eigen::VectorXd probe(candidate.size());
    for (int t = 0; t < trials; ++t) {
        for (Eigen::Index i = 0; i < probe.size(); ++i) probe[i] = candidate[i] + magnitude * normal(rng);
        if (!feasible(probe)) continue;
        if (objective(probe) < base - improvement_tol) return false;
    }
    return true;
}

} // namespace tibasap::oracles
