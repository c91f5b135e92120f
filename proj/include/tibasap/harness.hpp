#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tibasap/bregman.hpp"
#include "tibasap/io.hpp"
#include "tibasap/problems/logreg.hpp"
#include "tibasap/problems/qp.hpp"
#include "tibasap/schedules.hpp"
#include "tibasap/solver.hpp"

namespace tibasap::harness {

enum class Experiment { Qp, LogReg };
enum class Algorithm { Asap, AAsap, Alg1, Alg1F, Alg2 };
enum class ScheduleOverride { Fista, Ratio, Constant };

constexpr std::string_view to_string(Experiment e) { return e == Experiment::Qp ? "qp" : "logreg"; }

constexpr std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Asap: return "asap";
    case Algorithm::AAsap: return "aasap";
    case Algorithm::Alg1: return "alg1";
    case Algorithm::Alg1F: return "alg1f";
    case Algorithm::Alg2: return "alg2";
    }
    return "unknown";
}

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Asap, Algorithm::AAsap, Algorithm::Alg1, Algorithm::Alg1F,
                                               Algorithm::Alg2};
inline constexpr BregmanKind kAllKernels[] = {BregmanKind::ItakuraSaito, BregmanKind::SquaredEuclidean};

struct ExperimentConfig {
    Experiment experiment = Experiment::Qp;
    Algorithm algorithm = Algorithm::Alg2;
    BregmanKind bregman_x = BregmanKind::ItakuraSaito;
    std::optional<ScheduleOverride> schedule_override;
    bool bb = false;
    long n = 100;
    long d = 50;
    std::uint64_t seed = 1;
    double tol = 1e-4;
    long max_iter = 100000;
    std::optional<double> mu;
    double radius = 2.0;
    /// Allows schedules with alpha_k + beta_k >= 1 (the ratio schedule).
    bool unsafe_schedule = false;
    std::filesystem::path out_dir = ".";

    /// Desk-scale or full-scale defaults for an experiment.
    static ExperimentConfig defaults(Experiment e, bool full_scale = false) {
        ExperimentConfig c;
        c.experiment = e;
        if (e == Experiment::Qp) {
            c.n = full_scale ? 500 : 100;
            c.tol = 1e-4;
        } else {
            c.n = full_scale ? 500 : 200;
            c.d = full_scale ? 200 : 50;
            c.tol = 1e-5;
        }
        return c;
    }

    std::string cell_name() const {
        std::string name = std::string(to_string(algorithm)) + "-" + std::string(to_string(bregman_x));
        if (bb) name += "-bb";
        return name;
    }
};

// Extrapolation presets.
inline constexpr double kInertiaAlpha = 0.3;
inline constexpr double kInertiaBeta = 0.2;
inline constexpr double kAdaptiveAlphaMax = 0.5;
inline constexpr double kAdaptiveBetaMax = 0.499;
inline constexpr double kAdaptiveFactorQp = 1.2;
inline constexpr double kAdaptiveFactorLogReg = 1.5;
// Backtracking box for the logistic runs.
inline constexpr double kBacktrackRho = 2.0;
inline constexpr double kBacktrackDelta = 1e-5;
inline constexpr double kBacktrackTMin = 1.3;
// Kernel sizing: theta exceeds the relevant Lipschitz constant by this factor.
inline constexpr double kKernelSafety = 1.1;
inline constexpr double kDomainFloor = 1e-6;
/// Assumed norm of the logistic weight vector; the Itakura-Saito scale is
/// kLogRegWeightScale^2 / d, so gamma/x^2 = 1 at the typical coordinate size.
inline constexpr double kLogRegWeightScale = 1.0;
/// Upper end of the logistic Itakura-Saito working box (theta/eta bookkeeping).
inline constexpr double kLogRegIsUpper = 10.0;

inline ExtrapolationSchedule make_schedule(const ExperimentConfig& cfg) {
    if (cfg.schedule_override) {
        switch (*cfg.schedule_override) {
        case ScheduleOverride::Fista: return ExtrapolationSchedule::fista();
        case ScheduleOverride::Ratio:
            require(cfg.unsafe_schedule, ErrorCode::InvalidConfig,
                    "the ratio schedule exceeds alpha + beta < 1; pass --unsafe-schedule to allow it");
            return ExtrapolationSchedule::ratio(false);
        case ScheduleOverride::Constant: return ExtrapolationSchedule::constant(kInertiaAlpha, kInertiaBeta);
        }
    }
    switch (cfg.algorithm) {
    case Algorithm::Asap: return ExtrapolationSchedule::constant(0.0, 0.0);
    case Algorithm::AAsap: return ExtrapolationSchedule::constant(kInertiaAlpha, 0.0);
    case Algorithm::Alg1: return ExtrapolationSchedule::constant(kInertiaAlpha, kInertiaBeta);
    case Algorithm::Alg1F:
        require(cfg.unsafe_schedule, ErrorCode::InvalidConfig,
                "alg1f uses the ratio schedule, which exceeds alpha + beta < 1; pass --unsafe-schedule");
        return ExtrapolationSchedule::ratio(false);
    case Algorithm::Alg2: {
        const double t = cfg.experiment == Experiment::Qp ? kAdaptiveFactorQp : kAdaptiveFactorLogReg;
        return ExtrapolationSchedule::adaptive(kInertiaAlpha, kInertiaBeta, kAdaptiveAlphaMax, kAdaptiveBetaMax, t);
    }
    }
    throw Error(ErrorCode::InvalidConfig, "unknown algorithm");
}

inline QpInstance make_qp_instance(const ExperimentConfig& cfg) {
    return gen_qp(cfg.n, cfg.radius, cfg.seed, cfg.mu);
}

inline LogRegInstance make_logreg_instance(const ExperimentConfig& cfg) {
    LogRegOptions opt;
    if (cfg.mu) opt.mu = *cfg.mu;
    return gen_logreg(cfg.n, cfg.d, cfg.seed, opt);
}

/// Itakura-Saito scale for the QP x-block: the curvature gamma/x^2 equals
/// 1.1 max(L_g, 1) at the typical coordinate magnitude radius/sqrt(n).
inline double qp_is_gamma(double lip, double radius, Eigen::Index n) {
    return kKernelSafety * lip * radius * radius / static_cast<double>(n);
}

/// Solver configuration for a QP cell: phi2 = (lambda/2)||.||^2 with
/// lambda = 1.1 max(L_g, 1). phi1 is the same Euclidean kernel, or
/// Itakura-Saito on [floor, radius] scaled by qp_is_gamma.
inline SolverConfig make_qp_solver_config(const ExperimentConfig& cfg, const QpProblem& problem) {
    const double lip = std::max(*problem.lip_g(), 1.0);
    const BregmanGenerator y_kernel = BregmanGenerator::squared_euclidean(kKernelSafety * lip);
    const BregmanGenerator x_kernel =
        cfg.bregman_x == BregmanKind::SquaredEuclidean
            ? y_kernel
            : BregmanGenerator::itakura_saito(qp_is_gamma(lip, cfg.radius, problem.dim_x()), kDomainFloor,
                                              cfg.radius);
    SolverConfig sc(x_kernel, y_kernel, make_schedule(cfg));
    sc.tol = cfg.tol;
    sc.max_iter = cfg.max_iter;
    if (cfg.bb) sc.backtracking = BacktrackingOptions{kBacktrackRho, kBacktrackDelta, kBacktrackTMin,
                                                      StepInit::BarzilaiBorwein, 60};
    return sc;
}

/// Logistic cells always backtrack on x (L_grad_f is not supplied); --bb
/// switches the search start from carry-over to the BB quotient.
inline SolverConfig make_logreg_solver_config(const ExperimentConfig& cfg, const LogRegProblem& problem) {
    const double is_gamma = kLogRegWeightScale * kLogRegWeightScale / static_cast<double>(problem.dim_x());
    const BregmanGenerator y_kernel = BregmanGenerator::squared_euclidean(kKernelSafety * 1.0);
    const BregmanGenerator x_kernel =
        cfg.bregman_x == BregmanKind::SquaredEuclidean
            ? BregmanGenerator::squared_euclidean(1.0)
            : BregmanGenerator::itakura_saito(is_gamma, kDomainFloor, kLogRegIsUpper);
    SolverConfig sc(x_kernel, y_kernel, make_schedule(cfg));
    sc.tol = cfg.tol;
    sc.max_iter = cfg.max_iter;
    sc.backtracking = BacktrackingOptions{kBacktrackRho, kBacktrackDelta, kBacktrackTMin,
                                          cfg.bb ? StepInit::BarzilaiBorwein : StepInit::CarryOver, 60};
    return sc;
}

inline RunTrace run_qp(const ExperimentConfig& cfg, const QpInstance& inst, bool retain_points = false) {
    QpProblem problem(inst);
    SolverConfig sc = make_qp_solver_config(cfg, problem);
    sc.retain_points = retain_points;
    const bool positive = cfg.bregman_x == BregmanKind::ItakuraSaito;
    return run(problem, qp_random_start(inst, positive, cfg.seed, kDomainFloor), std::move(sc));
}

inline RunTrace run_logreg(const ExperimentConfig& cfg, const LogRegInstance& inst, bool retain_points = false) {
    LogRegProblem problem(inst);
    SolverConfig sc = make_logreg_solver_config(cfg, problem);
    sc.retain_points = retain_points;
    const bool positive = cfg.bregman_x == BregmanKind::ItakuraSaito;
    return run(problem, logreg_random_start(inst, positive, cfg.seed), std::move(sc));
}

/// One cell x seed outcome.
struct RunRecord {
    Experiment experiment = Experiment::Qp;
    Algorithm algorithm = Algorithm::Alg2;
    BregmanKind bregman = BregmanKind::ItakuraSaito;
    bool bb = false;
    std::uint64_t seed = 0;
    long iterations = 0;
    double time_seconds = 0.0;
    long extrapolations = 0;
    bool converged = false;
    std::string error; // empty on success
};

inline constexpr const char* kSummaryHeader =
    "experiment,algorithm,bregman,bb,seed,iter,time,extrapolation,converged,status";

inline std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

inline void write_summary_row(std::ostream& out, const RunRecord& r) {
    out << to_string(r.experiment) << ',' << to_string(r.algorithm) << ',' << to_string(r.bregman) << ','
        << (r.bb ? 1 : 0) << ',' << r.seed << ',' << r.iterations << ',' << io::format_double(r.time_seconds) << ','
        << r.extrapolations << ',' << (r.converged ? 1 : 0) << ',' << (r.error.empty() ? "ok" : csv_safe(r.error))
        << '\n';
}

inline void append_summary(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app | std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::InvalidConfig, "cannot open " + path.string());
    if (fresh) out << kSummaryHeader << '\n';
    for (const RunRecord& r : records) write_summary_row(out, r);
}

inline std::filesystem::path trace_path(const ExperimentConfig& cfg) {
    return cfg.out_dir / ("trace_" + cfg.cell_name() + "_" + std::to_string(cfg.seed) + ".csv");
}

/// Runs one configured cell on a prepared instance and writes its trace.
/// Solver errors are captured in the record, not thrown.
template <class Instance>
RunRecord run_cell(const ExperimentConfig& cfg, const Instance& inst, bool write_trace = true) {
    RunRecord rec;
    rec.experiment = cfg.experiment;
    rec.algorithm = cfg.algorithm;
    rec.bregman = cfg.bregman_x;
    rec.bb = cfg.bb;
    rec.seed = cfg.seed;
    try {
        RunTrace trace;
        if constexpr (std::is_same_v<Instance, QpInstance>)
            trace = run_qp(cfg, inst);
        else
            trace = run_logreg(cfg, inst);
        rec.iterations = trace.summary.iterations;
        rec.time_seconds = trace.summary.wall_time_seconds;
        rec.extrapolations = trace.summary.extrapolation_count;
        rec.converged = trace.summary.converged;
        if (write_trace) {
            std::ofstream out(trace_path(cfg), std::ios::binary);
            require(static_cast<bool>(out), ErrorCode::InvalidConfig, "cannot write " + trace_path(cfg).string());
            io::write_trace_csv(out, trace);
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

/// Single experiment: writes the trace, appends to summary.csv and returns
/// the record. Configuration errors propagate as exceptions.
inline RunRecord run_experiment(const ExperimentConfig& cfg) {
    (void)make_schedule(cfg); // surface configuration errors before any work
    std::filesystem::create_directories(cfg.out_dir);
    RunRecord rec = cfg.experiment == Experiment::Qp ? run_cell(cfg, make_qp_instance(cfg))
                                                     : run_cell(cfg, make_logreg_instance(cfg));
    append_summary(cfg.out_dir / "summary.csv", {rec});
    return rec;
}

/// Linear-interpolation quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct CellStats {
    Experiment experiment = Experiment::Qp;
    Algorithm algorithm = Algorithm::Alg2;
    BregmanKind bregman = BregmanKind::ItakuraSaito;
    bool bb = false;
    long runs = 0;
    long converged = 0;
    long failed = 0;
    double iter_median = 0, iter_iqr = 0;
    double time_median = 0, time_iqr = 0;
    double extrap_median = 0, extrap_iqr = 0;
};

inline constexpr const char* kTableHeader =
    "experiment,algorithm,bregman,bb,runs,converged,failed,iter_median,iter_iqr,time_median,time_iqr,"
    "extrapolation_median,extrapolation_iqr,status";

inline CellStats summarize_cell(const std::vector<RunRecord>& records) {
    CellStats s;
    if (records.empty()) return s;
    s.experiment = records.front().experiment;
    s.algorithm = records.front().algorithm;
    s.bregman = records.front().bregman;
    s.bb = records.front().bb;
    std::vector<double> iters, times, extraps;
    for (const RunRecord& r : records) {
        ++s.runs;
        if (!r.error.empty()) {
            ++s.failed;
            continue;
        }
        if (r.converged) ++s.converged;
        iters.push_back(static_cast<double>(r.iterations));
        times.push_back(r.time_seconds);
        extraps.push_back(static_cast<double>(r.extrapolations));
    }
    s.iter_median = quantile(iters, 0.5);
    s.iter_iqr = quantile(iters, 0.75) - quantile(iters, 0.25);
    s.time_median = quantile(times, 0.5);
    s.time_iqr = quantile(times, 0.75) - quantile(times, 0.25);
    s.extrap_median = quantile(extraps, 0.5);
    s.extrap_iqr = quantile(extraps, 0.75) - quantile(extraps, 0.25);
    return s;
}

inline void write_table_row(std::ostream& out, const CellStats& s) {
    out << to_string(s.experiment) << ',' << to_string(s.algorithm) << ',' << to_string(s.bregman) << ','
        << (s.bb ? 1 : 0) << ',' << s.runs << ',' << s.converged << ',' << s.failed << ','
        << io::format_double(s.iter_median) << ',' << io::format_double(s.iter_iqr) << ','
        << io::format_double(s.time_median) << ',' << io::format_double(s.time_iqr) << ','
        << io::format_double(s.extrap_median) << ',' << io::format_double(s.extrap_iqr) << ','
        << (s.failed ? "failed" : "ok") << '\n';
}

struct GridResult {
    std::vector<CellStats> cells;
    std::vector<RunRecord> records; // cell-major, seeds in the given order
};

/**
 * Every {asap, aasap, alg1, alg1f, alg2} x {is, euclid} cell over the seeds,
 * using `base` for everything else. The ratio-schedule cell is run with the
 * sum bound lifted. Runs execute on up to `jobs` threads; traces are written
 * by the workers, summary.csv and table.csv by the caller's thread.
 */
inline GridResult run_grid(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds,
                           unsigned jobs = 0, bool write_files = true) {
    require(!seeds.empty(), ErrorCode::InvalidConfig, "grid needs at least one seed");
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    if (write_files) std::filesystem::create_directories(base.out_dir);

    std::vector<QpInstance> qps;
    std::vector<LogRegInstance> logregs;
    for (std::uint64_t seed : seeds) {
        ExperimentConfig c = base;
        c.seed = seed;
        if (base.experiment == Experiment::Qp)
            qps.push_back(make_qp_instance(c));
        else
            logregs.push_back(make_logreg_instance(c));
    }

    std::vector<ExperimentConfig> jobs_cfg;
    std::vector<std::size_t> seed_index;
    for (Algorithm a : kAllAlgorithms)
        for (BregmanKind k : kAllKernels)
            for (std::size_t s = 0; s < seeds.size(); ++s) {
                ExperimentConfig c = base;
                c.algorithm = a;
                c.bregman_x = k;
                c.seed = seeds[s];
                c.schedule_override.reset();
                if (a == Algorithm::Alg1F) c.unsafe_schedule = true;
                jobs_cfg.push_back(c);
                seed_index.push_back(s);
            }

    std::vector<RunRecord> records(jobs_cfg.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs_cfg.size(); i = next++) {
            const ExperimentConfig& c = jobs_cfg[i];
            records[i] = c.experiment == Experiment::Qp ? run_cell(c, qps[seed_index[i]], write_files)
                                                        : run_cell(c, logregs[seed_index[i]], write_files);
        }
    };
    std::vector<std::thread> pool;
    const unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(jobs_cfg.size()));
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    GridResult result;
    result.records = records;
    for (std::size_t c = 0; c < records.size(); c += seeds.size()) {
        std::vector<RunRecord> cell(records.begin() + static_cast<std::ptrdiff_t>(c),
                                    records.begin() + static_cast<std::ptrdiff_t>(c + seeds.size()));
        result.cells.push_back(summarize_cell(cell));
    }
    if (write_files) {
        append_summary(base.out_dir / "summary.csv", records);
        std::ofstream table(base.out_dir / "table.csv", std::ios::binary);
        require(static_cast<bool>(table), ErrorCode::InvalidConfig, "cannot write table.csv");
        table << kTableHeader << '\n';
        for (const CellStats& s : result.cells) write_table_row(table, s);
    }
    return result;
}

} // namespace tibasap::harness
