#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tibasap {

enum class ErrorCode {
    DomainViolation,
    DimensionMismatch,
    SumBoundViolation,
    SubproblemFailure,
    BacktrackDivergence,
    NonDescent,
    MissingHatPoints,
    InvalidModulus,
    MissingOracle,
    UnsupportedGenerator,
    BisectionFailure,
    BudgetExceeded,
    InvalidConfig,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SumBoundViolation: return "SumBoundViolation";
    case ErrorCode::SubproblemFailure: return "SubproblemFailure";
    case ErrorCode::BacktrackDivergence: return "BacktrackDivergence";
    case ErrorCode::NonDescent: return "NonDescent";
    case ErrorCode::MissingHatPoints: return "MissingHatPoints";
    case ErrorCode::InvalidModulus: return "InvalidModulus";
    case ErrorCode::MissingOracle: return "MissingOracle";
    case ErrorCode::UnsupportedGenerator: return "UnsupportedGenerator";
    case ErrorCode::BisectionFailure: return "BisectionFailure";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) throw Error(code, what);
}

} // namespace tibasap
