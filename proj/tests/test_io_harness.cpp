#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tibasap/harness.hpp"
#include "tibasap/io.hpp"

using namespace tibasap;
using namespace tibasap::harness;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("tibasap_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

} // namespace

TEST(Io, FormatDoubleRoundTrips) {
    for (double v : {0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, 0.0}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(Io, TraceCsvLayout) {
    RunTrace t;
    TraceRow r;
    r.k = 0;
    r.E = 0.5;
    r.L_z = -1.25;
    r.L_hat = -1.5;
    r.accepted = true;
    r.alpha = 0.3;
    r.beta = 0.2;
    r.t_x = 1.3;
    t.rows.push_back(r);
    std::ostringstream out;
    io::write_trace_csv(out, t);
    EXPECT_EQ(out.str(), "k,E,L,L_hat,accepted,alpha,beta,t_x,t_y,elapsed\n"
                         "0,0.5,-1.25,-1.5,1,0.29999999999999999,0.20000000000000001,1.3,1,0\n");
}

TEST(Io, QpInstanceRoundTrip) {
    const QpInstance inst = gen_qp(7, 1.5, 12);
    std::stringstream buf;
    io::write_instance(buf, inst);
    const auto back = std::get<QpInstance>(io::read_instance(buf));
    EXPECT_EQ(back.A, inst.A);
    EXPECT_EQ(back.b, inst.b);
    EXPECT_EQ(back.mu, inst.mu);
    EXPECT_EQ(back.radius, inst.radius);
    EXPECT_EQ(back.seed, 12u);
}

TEST(Io, LogRegInstanceRoundTrip) {
    const LogRegInstance inst = gen_logreg(9, 4, 5);
    std::stringstream buf;
    io::write_instance(buf, inst);
    const auto back = std::get<LogRegInstance>(io::read_instance(buf));
    EXPECT_EQ(back.samples, inst.samples);
    EXPECT_EQ(back.labels, inst.labels);
    EXPECT_EQ(back.lambda, inst.lambda);
    EXPECT_EQ(back.theta_cap, inst.theta_cap);
}

TEST(Io, ParseErrors) {
    for (const char* text : {"", "svm 3", "qp 2 1 1 0\n1 2 3", "qp 1 1 1 0\n1 x", "logreg 1 1 0.1 0.1 1 0\n2 0.5"}) {
        std::istringstream in(text);
        try {
            (void)io::read_instance(in);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ParseError) << text;
        }
    }
}

TEST(Harness, PresetSchedules) {
    ExperimentConfig c = ExperimentConfig::defaults(Experiment::Qp);
    c.algorithm = Algorithm::Asap;
    Extrapolation w = make_schedule(c).next();
    EXPECT_EQ(w.alpha, 0.0);
    EXPECT_EQ(w.beta, 0.0);
    c.algorithm = Algorithm::AAsap;
    w = make_schedule(c).next();
    EXPECT_EQ(w.alpha, 0.3);
    EXPECT_EQ(w.beta, 0.0);
    c.algorithm = Algorithm::Alg1;
    w = make_schedule(c).next();
    EXPECT_EQ(w.beta, 0.2);
    c.algorithm = Algorithm::Alg2;
    EXPECT_EQ(make_schedule(c).t_factor(), 1.2);
    EXPECT_EQ(make_schedule(ExperimentConfig::defaults(Experiment::LogReg)).t_factor(), 1.5);
    EXPECT_EQ(make_schedule(c).beta_max(), 0.499);
    c.algorithm = Algorithm::Alg1F;
    EXPECT_THROW((void)make_schedule(c), Error);
    c.unsafe_schedule = true;
    EXPECT_EQ(make_schedule(c).variant(), ScheduleVariant::Ratio);
    c.schedule_override = ScheduleOverride::Fista;
    EXPECT_EQ(make_schedule(c).variant(), ScheduleVariant::Fista);
}

TEST(Harness, Defaults) {
    const auto qp = ExperimentConfig::defaults(Experiment::Qp);
    EXPECT_EQ(qp.n, 100);
    EXPECT_EQ(qp.tol, 1e-4);
    EXPECT_EQ(ExperimentConfig::defaults(Experiment::Qp, true).n, 500);
    const auto lr = ExperimentConfig::defaults(Experiment::LogReg, true);
    EXPECT_EQ(lr.n, 500);
    EXPECT_EQ(lr.d, 200);
    EXPECT_EQ(lr.tol, 1e-5);
    ExperimentConfig c = qp;
    c.algorithm = Algorithm::Alg1F;
    c.bregman_x = BregmanKind::SquaredEuclidean;
    c.bb = true;
    EXPECT_EQ(c.cell_name(), "alg1f-euclid-bb");
}

TEST(Harness, QpKernels) {
    ExperimentConfig c = ExperimentConfig::defaults(Experiment::Qp);
    c.n = 20;
    const QpProblem p(make_qp_instance(c));
    const double lip = std::max(*p.lip_g(), 1.0);
    const SolverConfig is = make_qp_solver_config(c, p);
    EXPECT_EQ(is.bregman_x.kind(), BregmanKind::ItakuraSaito);
    EXPECT_DOUBLE_EQ(is.bregman_x.gamma(), 1.1 * lip * 4.0 / 20.0);
    EXPECT_DOUBLE_EQ(is.bregman_y.gamma(), 1.1 * lip);
    EXPECT_FALSE(is.backtracking.has_value());
    c.bregman_x = BregmanKind::SquaredEuclidean;
    c.bb = true;
    const SolverConfig eu = make_qp_solver_config(c, p);
    EXPECT_DOUBLE_EQ(eu.bregman_x.theta(), 1.1 * lip);
    ASSERT_TRUE(eu.backtracking.has_value());
    EXPECT_EQ(eu.backtracking->init, StepInit::BarzilaiBorwein);
}

TEST(Harness, LogRegAlwaysBacktracks) {
    ExperimentConfig c = ExperimentConfig::defaults(Experiment::LogReg);
    const LogRegProblem p(make_logreg_instance(c));
    const SolverConfig sc = make_logreg_solver_config(c, p);
    ASSERT_TRUE(sc.backtracking.has_value());
    EXPECT_EQ(sc.backtracking->init, StepInit::CarryOver);
    EXPECT_EQ(sc.backtracking->t_min, 1.3);
    EXPECT_EQ(sc.backtracking->rho, 2.0);
    EXPECT_EQ(sc.backtracking->delta, 1e-5);
    EXPECT_DOUBLE_EQ(sc.bregman_y.gamma(), 1.1);
    EXPECT_DOUBLE_EQ(sc.bregman_x.gamma(), 1.0 / 50.0);
}

TEST(Harness, Quantile) {
    EXPECT_EQ(quantile({3, 1, 2}, 0.5), 2.0);
    EXPECT_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
    EXPECT_EQ(quantile({1, 2, 3, 4, 5}, 0.25), 2.0);
    EXPECT_TRUE(std::isnan(quantile({}, 0.5)));
}

TEST(Harness, SummarizeSkipsFailures) {
    std::vector<RunRecord> recs(3);
    recs[0].iterations = 10;
    recs[0].converged = true;
    recs[1].iterations = 30;
    recs[2].error = "boom";
    const CellStats s = summarize_cell(recs);
    EXPECT_EQ(s.runs, 3);
    EXPECT_EQ(s.converged, 1);
    EXPECT_EQ(s.failed, 1);
    EXPECT_EQ(s.iter_median, 20.0);
}

TEST(Harness, RunExperimentWritesFiles) {
    ExperimentConfig c = ExperimentConfig::defaults(Experiment::Qp);
    c.n = 15;
    c.out_dir = scratch_dir("single");
    const RunRecord rec = run_experiment(c);
    EXPECT_TRUE(rec.error.empty()) << rec.error;
    EXPECT_TRUE(rec.converged);
    const auto trace = lines_of(c.out_dir / "trace_alg2-is_1.csv");
    ASSERT_EQ(trace.size(), static_cast<std::size_t>(rec.iterations) + 1);
    EXPECT_EQ(trace.front(), io::kTraceHeader);
    (void)run_experiment(c);
    const auto summary = lines_of(c.out_dir / "summary.csv");
    ASSERT_EQ(summary.size(), 3u);
    EXPECT_EQ(summary[0], kSummaryHeader);
    const auto head = [](const std::string& row) { return row.substr(0, row.find(",", row.find(",1,") + 3)); };
    EXPECT_EQ(head(summary[1]), head(summary[2]));
    EXPECT_EQ(head(summary[1]), "qp,alg2,is,0,1," + std::to_string(rec.iterations));
}

TEST(Harness, RunCellCapturesErrors) {
    ExperimentConfig c = ExperimentConfig::defaults(Experiment::Qp);
    c.n = 5;
    c.tol = -1.0;
    const RunRecord rec = run_cell(c, make_qp_instance(c), false);
    EXPECT_FALSE(rec.error.empty());
}

TEST(Harness, GridCoversEveryCell) {
    ExperimentConfig c = ExperimentConfig::defaults(Experiment::LogReg);
    c.n = 40;
    c.d = 8;
    c.max_iter = 3000;
    c.out_dir = scratch_dir("grid");
    const GridResult g = run_grid(c, {1, 2}, 2);
    ASSERT_EQ(g.cells.size(), 10u);
    EXPECT_EQ(g.records.size(), 20u);
    for (const CellStats& s : g.cells) {
        EXPECT_EQ(s.runs, 2);
        EXPECT_EQ(s.failed, 0);
    }
    EXPECT_EQ(lines_of(c.out_dir / "table.csv").size(), 11u);
    EXPECT_EQ(lines_of(c.out_dir / "summary.csv").size(), 21u);
    EXPECT_TRUE(std::filesystem::exists(c.out_dir / "trace_alg1f-euclid_2.csv"));
    // threads do not change results
    const GridResult serial = run_grid(c, {1, 2}, 1, false);
    for (std::size_t i = 0; i < g.records.size(); ++i)
        EXPECT_EQ(serial.records[i].iterations, g.records[i].iterations);
}
