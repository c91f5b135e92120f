#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>

#include "tibasap/error.hpp"

namespace tibasap {

enum class ScheduleVariant { Constant, Fista, Ratio, Adaptive };

constexpr std::string_view to_string(ScheduleVariant v) {
    switch (v) {
    case ScheduleVariant::Constant: return "constant";
    case ScheduleVariant::Fista: return "fista";
    case ScheduleVariant::Ratio: return "ratio";
    case ScheduleVariant::Adaptive: return "adaptive";
    }
    return "unknown";
}

struct Extrapolation {
    double alpha = 0.0;
    double beta = 0.0;
};

/**
 * Produces the inertial weights (alpha_k, beta_k) for each iteration.
 *
 * The solver calls next() before the step. Only the adaptive variant
 * listens to the acceptance verdict, delivered afterwards via report();
 * the verdict then shapes the weights of the following iteration.
 */
class ExtrapolationSchedule {
public:
    static ExtrapolationSchedule constant(double alpha, double beta) {
        require(alpha >= 0 && beta >= 0, ErrorCode::InvalidConfig, "extrapolation weights must be nonnegative");
        ExtrapolationSchedule s(ScheduleVariant::Constant);
        s.alpha_ = s.alpha_max_ = alpha;
        s.beta_ = s.beta_max_ = beta;
        return s;
    }

    static ExtrapolationSchedule fista() { return ExtrapolationSchedule(ScheduleVariant::Fista); }

    /// alpha_k = beta_k = max(0, (k-1)/(k+2)). Leaves alpha+beta<1 from k=4 on,
    /// so it is only usable with the sum bound switched off.
    static ExtrapolationSchedule ratio(bool enforce_sum_bound = true) {
        ExtrapolationSchedule s(ScheduleVariant::Ratio);
        s.enforce_sum_bound_ = enforce_sum_bound;
        return s;
    }

    static ExtrapolationSchedule adaptive(double alpha0, double beta0, double alpha_max, double beta_max,
                                          double t_factor, bool enforce_sum_bound = true) {
        require(t_factor > 1.0, ErrorCode::InvalidConfig, "adaptive multiplier t must exceed 1");
        require(alpha_max >= 0 && beta_max >= 0, ErrorCode::InvalidConfig, "caps must be nonnegative");
        require(alpha0 >= 0 && alpha0 <= alpha_max && beta0 >= 0 && beta0 <= beta_max, ErrorCode::InvalidConfig,
                "initial weights must lie within their caps");
        if (enforce_sum_bound)
            require(alpha_max + beta_max < 1.0, ErrorCode::SumBoundViolation, "alpha_max + beta_max must be < 1");
        ExtrapolationSchedule s(ScheduleVariant::Adaptive);
        s.alpha_ = alpha0;
        s.beta_ = beta0;
        s.alpha_max_ = alpha_max;
        s.beta_max_ = beta_max;
        s.t_factor_ = t_factor;
        s.enforce_sum_bound_ = enforce_sum_bound;
        return s;
    }

    ScheduleVariant variant() const noexcept { return variant_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double alpha_max() const noexcept { return alpha_max_; }
    double beta_max() const noexcept { return beta_max_; }
    double t_factor() const noexcept { return t_factor_; }
    double t_prev() const noexcept { return t_prev_; }
    double t_cur() const noexcept { return t_cur_; }
    long k() const noexcept { return k_; }
    bool enforce_sum_bound() const noexcept { return enforce_sum_bound_; }

    Extrapolation next() {
        switch (variant_) {
        case ScheduleVariant::Constant: return next_constant();
        case ScheduleVariant::Fista: return next_fista();
        case ScheduleVariant::Ratio: return next_ratio();
        case ScheduleVariant::Adaptive: return {alpha_, beta_};
        }
        return {};
    }

    void report(bool accepted) {
        if (variant_ == ScheduleVariant::Adaptive) adaptive_update(accepted);
    }

    Extrapolation next_constant() const {
        expect(ScheduleVariant::Constant);
        return {alpha_, beta_};
    }

    Extrapolation next_fista() {
        expect(ScheduleVariant::Fista);
        const double w = (t_prev_ - 1.0) / (2.0 * t_cur_);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_cur_ * t_cur_));
        t_prev_ = t_cur_;
        t_cur_ = t_next;
        ++k_;
        alpha_ = beta_ = w;
        return {w, w};
    }

    Extrapolation next_ratio() {
        expect(ScheduleVariant::Ratio);
        const double kd = static_cast<double>(k_);
        const double w = std::max(0.0, (kd - 1.0) / (kd + 2.0));
        if (enforce_sum_bound_)
            require(w + w < 1.0, ErrorCode::SumBoundViolation, "ratio schedule reached alpha + beta >= 1");
        ++k_;
        alpha_ = beta_ = w;
        return {w, w};
    }

    /// Grow both weights by t after an accepted extrapolation (capped),
    /// shrink them by t after a rejection.
    void adaptive_update(bool accepted) {
        expect(ScheduleVariant::Adaptive);
        if (accepted) {
            alpha_ = std::min(t_factor_ * alpha_, alpha_max_);
            beta_ = std::min(t_factor_ * beta_, beta_max_);
        } else {
            alpha_ /= t_factor_;
            beta_ /= t_factor_;
        }
        ++k_;
    }

    /// Jump the ratio counter; used to probe a given k directly.
    void set_k(long k) { k_ = k; }

private:
    explicit ExtrapolationSchedule(ScheduleVariant v) : variant_(v) {}

    void expect(ScheduleVariant v) const {
        require(variant_ == v, ErrorCode::InvalidConfig, "schedule variant mismatch");
    }

    ScheduleVariant variant_;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double alpha_max_ = 1.0;
    double beta_max_ = 1.0;
    double t_factor_ = 1.0;
    double t_prev_ = 1.0;
    double t_cur_ = 1.0;
    long k_ = 0;
    bool enforce_sum_bound_ = false;
};

} // namespace tibasap
