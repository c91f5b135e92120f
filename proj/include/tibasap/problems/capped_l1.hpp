#pragma once

#include <algorithm>
#include <cmath>

#include "tibasap/types.hpp"

namespace tibasap {

/// weight * min(|y|, theta) + (y - u)^2 / 2
inline double capped_l1_scalar_objective(double y, double u, double weight, double theta_cap) {
    const double d = y - u;
    return weight * std::min(std::abs(y), theta_cap) + 0.5 * d * d;
}

/// Scalar prox of weight * min(|.|, theta_cap). The penalty is flat past the
/// cap and an l1 term inside it, so the minimizer is the better of the two
/// region-wise minimizers.
inline double capped_l1_prox_scalar(double u, double weight, double theta_cap) {
    const double s = (u > 0.0) - (u < 0.0);
    const double a = std::abs(u);
    const double outer = s * std::max(theta_cap, a);
    const double inner = s * std::min(theta_cap, std::max(0.0, a - weight));
    const double h_outer = capped_l1_scalar_objective(outer, u, weight, theta_cap);
    const double h_inner = capped_l1_scalar_objective(inner, u, weight, theta_cap);
    if (h_outer < h_inner) return outer;
    if (h_inner < h_outer) return inner;
    return std::abs(inner) <= std::abs(outer) ? inner : outer;
}

inline Vector capped_l1_prox(const Vector& u, double weight, double theta_cap) {
    require(weight >= 0.0, ErrorCode::InvalidConfig, "capped-l1 weight must be nonnegative");
    require(theta_cap > 0.0, ErrorCode::InvalidConfig, "capped-l1 cap must be positive");
    Vector out(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) out[j] = capped_l1_prox_scalar(u[j], weight, theta_cap);
    return out;
}

} // namespace tibasap
