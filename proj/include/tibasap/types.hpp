#pragma once

#include <Eigen/Dense>

#include "tibasap/error.hpp"

namespace tibasap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One point z = (x, y) of the two-block problem.
struct IteratePair {
    Vector x;
    Vector y;

    bool same_shape(const IteratePair& other) const {
        return x.size() == other.x.size() && y.size() == other.y.size();
    }
};

inline void require_same_shape(const IteratePair& a, const IteratePair& b, const char* where) {
    require(a.same_shape(b), ErrorCode::DimensionMismatch, where);
}

/// ‖(a.x - b.x, a.y - b.y)‖² over both blocks.
inline double squared_distance(const IteratePair& a, const IteratePair& b) {
    return (a.x - b.x).squaredNorm() + (a.y - b.y).squaredNorm();
}

} // namespace tibasap
