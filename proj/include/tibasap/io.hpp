#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

#include "tibasap/problems/logreg.hpp"
#include "tibasap/problems/qp.hpp"
#include "tibasap/solver.hpp"

namespace tibasap::io {

/// Shortest text that reads back to the same double (17 significant digits).
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* kTraceHeader = "k,E,L,L_hat,accepted,alpha,beta,t_x,t_y,elapsed";

/// One row per iteration; LF endings. Every column but `elapsed` is a
/// deterministic function of the instance, start point and config.
inline void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    out << kTraceHeader << '\n';
    for (const TraceRow& r : trace.rows) {
        out << r.k << ',' << format_double(r.E) << ',' << format_double(r.L_z) << ',' << format_double(r.L_hat)
            << ',' << (r.accepted ? 1 : 0) << ',' << format_double(r.alpha) << ',' << format_double(r.beta) << ','
            << format_double(r.t_x) << ',' << format_double(r.t_y) << ',' << format_double(r.elapsed) << '\n';
    }
}

// Instance files: one header line
//   qp <n> <radius> <mu> <seed>
//   logreg <n> <d> <lambda> <theta> <mu> <seed>
// followed by whitespace-separated decimal entries: A row-major then b for
// qp; samples row-major then labels for logreg.

namespace detail {

inline void write_matrix(std::ostream& out, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
        out << '\n';
    }
}

inline void write_vector(std::ostream& out, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << format_double(v[i]);
    out << '\n';
}

inline double read_double(std::istream& in) {
    std::string token;
    if (!(in >> token)) throw Error(ErrorCode::ParseError, "instance file truncated");
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw Error(ErrorCode::ParseError, "bad number '" + token + "'");
        return v;
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::ParseError, "bad number '" + token + "'");
    }
}

template <class Int>
Int read_int(std::istream& in) {
    long long v = 0;
    if (!(in >> v) || v < 0) throw Error(ErrorCode::ParseError, "expected a nonnegative integer");
    return static_cast<Int>(v);
}

} // namespace detail

inline void write_instance(std::ostream& out, const QpInstance& inst) {
    out << "qp " << inst.n() << ' ' << format_double(inst.radius) << ' ' << format_double(inst.mu) << ' '
        << inst.seed << '\n';
    detail::write_matrix(out, inst.A);
    detail::write_vector(out, inst.b);
}

inline void write_instance(std::ostream& out, const LogRegInstance& inst) {
    out << "logreg " << inst.n() << ' ' << inst.d() << ' ' << format_double(inst.lambda) << ' '
        << format_double(inst.theta_cap) << ' ' << format_double(inst.mu) << ' ' << inst.seed << '\n';
    detail::write_matrix(out, inst.samples);
    detail::write_vector(out, inst.labels);
}

using AnyInstance = std::variant<QpInstance, LogRegInstance>;

inline AnyInstance read_instance(std::istream& in) {
    std::string kind;
    if (!(in >> kind)) throw Error(ErrorCode::ParseError, "empty instance file");
    if (kind == "qp") {
        QpInstance inst;
        const auto n = detail::read_int<Eigen::Index>(in);
        inst.radius = detail::read_double(in);
        inst.mu = detail::read_double(in);
        inst.seed = detail::read_int<std::uint64_t>(in);
        inst.A.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) inst.A(i, j) = detail::read_double(in);
        inst.b.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) inst.b[i] = detail::read_double(in);
        return inst;
    }
    if (kind == "logreg") {
        LogRegInstance inst;
        const auto n = detail::read_int<Eigen::Index>(in);
        const auto d = detail::read_int<Eigen::Index>(in);
        inst.lambda = detail::read_double(in);
        inst.theta_cap = detail::read_double(in);
        inst.mu = detail::read_double(in);
        inst.seed = detail::read_int<std::uint64_t>(in);
        inst.samples.resize(n, d);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j) inst.samples(i, j) = detail::read_double(in);
        inst.labels.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            inst.labels[i] = detail::read_double(in);
            if (inst.labels[i] != 1.0 && inst.labels[i] != -1.0)
                throw Error(ErrorCode::ParseError, "labels must be -1 or +1");
        }
        return inst;
    }
    throw Error(ErrorCode::ParseError, "unknown instance kind '" + kind + "'");
}

} // namespace tibasap::io
