#pragma once

#include <cmath>
#include <string_view>

#include "tibasap/types.hpp"

namespace tibasap {

enum class BregmanKind { SquaredEuclidean, ItakuraSaito };

constexpr std::string_view to_string(BregmanKind kind) {
    return kind == BregmanKind::SquaredEuclidean ? "euclid" : "is";
}

/**
 * Strongly convex kernel phi together with the constants the descent
 * analysis needs: strong convexity modulus `theta` and the Lipschitz bound
 * `eta` of grad phi on the working domain.
 *
 *   SquaredEuclidean: phi(x) = (gamma/2) ||x||^2,  theta = eta = gamma.
 *   ItakuraSaito:     phi(x) = -gamma sum ln x_i on [lower, upper]^d, so the
 *                     Hessian gamma/x_i^2 gives theta = gamma/upper^2 and
 *                     eta = gamma/lower^2.
 *
 * Immutable once built.
 */
class BregmanGenerator {
public:
    static BregmanGenerator squared_euclidean(double gamma) {
        require(gamma > 0 && std::isfinite(gamma), ErrorCode::InvalidModulus, "gamma must be positive");
        return BregmanGenerator(BregmanKind::SquaredEuclidean, gamma, gamma, gamma, 0.0, 0.0);
    }

    /// Working box [lower, upper]; lower doubles as the domain floor.
    static BregmanGenerator itakura_saito(double gamma, double lower = 1e-6, double upper = 1.0) {
        require(gamma > 0 && std::isfinite(gamma), ErrorCode::InvalidModulus, "gamma must be positive");
        require(lower > 0 && upper > lower, ErrorCode::InvalidModulus,
                "Itakura-Saito working box needs 0 < lower < upper");
        return BregmanGenerator(BregmanKind::ItakuraSaito, gamma, gamma / (upper * upper),
                                gamma / (lower * lower), lower, upper);
    }

    /// Generator whose modulus exceeds `lipschitz` by `safety`: gamma is
    /// chosen so that theta = safety * lipschitz.
    static BregmanGenerator sized_for(BregmanKind kind, double lipschitz, double safety = 1.1,
                                      double lower = 1e-6, double upper = 1.0) {
        require(lipschitz > 0, ErrorCode::InvalidModulus, "Lipschitz constant must be positive");
        if (kind == BregmanKind::SquaredEuclidean) return squared_euclidean(safety * lipschitz);
        return itakura_saito(safety * lipschitz * upper * upper, lower, upper);
    }

    BregmanKind kind() const noexcept { return kind_; }
    double gamma() const noexcept { return gamma_; }
    double theta() const noexcept { return theta_; }
    double eta() const noexcept { return eta_; }
    double domain_floor() const noexcept { return floor_; }
    double working_upper() const noexcept { return upper_; }
    bool is_euclidean() const noexcept { return kind_ == BregmanKind::SquaredEuclidean; }

    bool in_domain(const Vector& x) const {
        if (kind_ == BregmanKind::SquaredEuclidean) return x.allFinite();
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (!(x[i] >= floor_) || !std::isfinite(x[i])) return false;
        return true;
    }

    double value(const Vector& x) const {
        check_domain(x);
        if (kind_ == BregmanKind::SquaredEuclidean) return 0.5 * gamma_ * x.squaredNorm();
        return -gamma_ * x.array().log().sum();
    }

    Vector gradient(const Vector& x) const {
        check_domain(x);
        if (kind_ == BregmanKind::SquaredEuclidean) return gamma_ * x;
        return -gamma_ * x.cwiseInverse();
    }

    /// D(x, y) in the kind's closed form.
    double distance(const Vector& x, const Vector& y) const {
        require(x.size() == y.size(), ErrorCode::DimensionMismatch, "Bregman distance operands differ in size");
        check_domain(x);
        check_domain(y);
        if (kind_ == BregmanKind::SquaredEuclidean) return 0.5 * gamma_ * (x - y).squaredNorm();
        double sum = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double r = x[i] / y[i];
            // r - 1 - ln r, with log1p for r near 1
            sum += (r - 1.0) - std::log1p(r - 1.0);
        }
        return gamma_ * sum;
    }

private:
    BregmanGenerator(BregmanKind kind, double gamma, double theta, double eta, double floor, double upper)
        : kind_(kind), gamma_(gamma), theta_(theta), eta_(eta), floor_(floor), upper_(upper) {}

    void check_domain(const Vector& x) const {
        if (kind_ == BregmanKind::ItakuraSaito && !in_domain(x))
            throw Error(ErrorCode::DomainViolation, "Itakura-Saito argument below the domain floor");
    }

    BregmanKind kind_;
    double gamma_;
    double theta_;
    double eta_;
    double floor_;
    double upper_;
};

} // namespace tibasap
