#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "clamg/config.hpp"
#include "clamg/driver.hpp"
#include "clamg/matrix_io.hpp"
#include "clamg/problems.hpp"
#include "clamg/report.hpp"
#include "json.hpp"

using namespace clamg;

namespace {

SolveReport fixture_report() {
    SolveReport r;
    r.problem = "poisson7:8,8,8";
    r.n = 512;
    r.nnz = 3200;
    r.method = "pcg";
    r.interp = "extended-i";
    r.smoother = "jacobi";
    r.soc = "classical";
    r.filter_target = "none";
    r.iterations = 9;
    r.converged = true;
    r.rel_residual = 3.25e-9;
    r.grid_complexity = 1.3125;
    r.operator_complexity = 2.5;
    r.setup_time = 0.012;
    r.solve_time = 0.004;
    r.total_time = 0.016;
    r.levels = {{512, 3200, 1.0}, {64, 1000, 0.125}, {8, 64, 0.125}};
    return r;
}

std::string golden(const std::string& name) {
    std::ifstream in(std::string(CLAMG_GOLDEN_DIR) + "/" + name);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig small_run() {
    RunConfig cfg;
    cfg.generator = "poisson7:10,10,10";
    cfg.amg.smoother = SmootherKind::Jacobi;
    return cfg;
}

} // namespace

TEST(Keys, KnownSetAndEnvNames) {
    EXPECT_TRUE(is_known_key("interp-kind"));
    EXPECT_TRUE(is_known_key("filter-rho"));
    EXPECT_FALSE(is_known_key("interp"));
    EXPECT_EQ(env_name("soc-theta"), "CLAMG_SOC_THETA");
    for (const auto& k : known_keys())
        EXPECT_FALSE(k.help.empty()) << k.name;
}

TEST(Keys, ApplyParsesValues) {
    RunConfig cfg;
    apply_key(cfg, "interp-kind", "hybrid");
    apply_key(cfg, "soc-kind", "strong-coupling");
    apply_key(cfg, "soc-theta", "0.5");
    apply_key(cfg, "smooth-prolongation", "on");
    apply_key(cfg, "filter-target", "both");
    apply_key(cfg, "testspace-kind", "srqm-from-analytic");
    apply_key(cfg, "method", "bicgstab");
    EXPECT_EQ(cfg.amg.interp, InterpKind::Hybrid);
    EXPECT_EQ(cfg.amg.soc, SocKind::StrongCoupling);
    ASSERT_TRUE(cfg.amg.soc_filter.has_value());
    EXPECT_DOUBLE_EQ(cfg.amg.soc_filter->value, 0.5);
    EXPECT_TRUE(cfg.amg.smooth_prolongation);
    EXPECT_EQ(cfg.amg.filter_target, FilterTarget::Both);
    EXPECT_EQ(cfg.amg.testspace, TestSpaceKind::SrqmFromAnalytic);
    EXPECT_EQ(cfg.method, MethodChoice::BiCGstab);
    EXPECT_THROW(apply_key(cfg, "interp-kind", "cubic"), Error);
    EXPECT_THROW(apply_key(cfg, "nu1", "two"), Error);
    EXPECT_THROW(apply_key(cfg, "nu1", "2x"), Error);
    EXPECT_THROW(apply_key(cfg, "no-such-key", "1"), Error);
}

TEST(Recipe, SectionsCommentsAndQuotes) {
    std::istringstream in(R"(# beam recipe
[interp]
kind = bamg        ; trailing comment
bamg-lmax = 4
[soc]
kind = "strong-coupling"

[testspace]
kind = rigid-body
method = bicgstab
)");
    RunConfig cfg;
    load_recipe(cfg, in);
    EXPECT_EQ(cfg.amg.interp, InterpKind::Bamg);
    EXPECT_EQ(cfg.amg.bamg.l_max, 4);
    EXPECT_EQ(cfg.amg.soc, SocKind::StrongCoupling);
    EXPECT_EQ(cfg.amg.testspace, TestSpaceKind::RigidBody);
    EXPECT_EQ(cfg.method, MethodChoice::BiCGstab);
}

TEST(Recipe, ErrorsCarryLineNumbers) {
    for (const auto& [text, line] : {std::pair<std::string, std::size_t>{"nu1 = 1\nbogus = 3\n", 2},
                                     {"\n\n[interp\n", 3},
                                     {"nu2 1\n", 1},
                                     {"nu1 = 1\nrtol = abc\n", 2}}) {
        std::istringstream in(text);
        RunConfig cfg;
        try {
            load_recipe(cfg, in);
            FAIL() << text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), line) << text;
        }
    }
}

TEST(Environment, OverridesKeys) {
    RunConfig cfg;
    ::setenv("CLAMG_SOC_KIND", "affinity", 1);
    ::setenv("CLAMG_NU2", "3", 1);
    apply_environment(cfg);
    ::unsetenv("CLAMG_SOC_KIND");
    ::unsetenv("CLAMG_NU2");
    EXPECT_EQ(cfg.amg.soc, SocKind::Affinity);
    EXPECT_EQ(cfg.amg.nu2, 3);
}

TEST(RunConfigCheck, InputsAndSpdRouting) {
    RunConfig cfg;
    EXPECT_THROW(cfg.validate(), Error);
    cfg.generator = "poisson7:4,4,4";
    cfg.matrix = "a.mtx";
    EXPECT_THROW(cfg.validate(), Error);
    cfg.matrix.clear();
    EXPECT_NO_THROW(cfg.validate());

    cfg.amg.filter_target = FilterTarget::Operator;
    EXPECT_EQ(cfg.resolved_method(), KrylovMethod::BiCGstab);
    cfg.method = MethodChoice::Pcg;
    try {
        cfg.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("no more guaranteed to be SPD"), std::string::npos);
    }
    cfg.amg.filter_target = FilterTarget::Prolongation;
    EXPECT_NO_THROW(cfg.validate());
    cfg.method = MethodChoice::Auto;
    EXPECT_EQ(cfg.resolved_method(), KrylovMethod::Pcg);
}

TEST(Report, GoldenTextJsonCsv) {
    const auto r = fixture_report();
    EXPECT_EQ(report_emit(r, ReportFormat::Text), golden("report.txt"));
    EXPECT_EQ(report_emit(r, ReportFormat::Json), golden("report.json"));
    EXPECT_EQ(report_emit(r, ReportFormat::Csv), golden("report.csv"));
}

TEST(Report, HistoryOmittedWhenEmpty) {
    auto r = fixture_report();
    for (auto f : {ReportFormat::Text, ReportFormat::Json, ReportFormat::Csv})
        EXPECT_EQ(report_emit(r, f).find("history"), std::string::npos);
    r.history = {1.0, 0.1, 0.001};
    const auto j = nlohmann::json::parse(report_emit(r, ReportFormat::Json));
    EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
    EXPECT_EQ(j["history"].size(), 3u);
    EXPECT_NE(report_emit(r, ReportFormat::Csv).find("iteration,relative_residual"), std::string::npos);
}

TEST(Report, CsvLevelTableRoundTrips) {
    auto r = fixture_report();
    r.levels.push_back({3, 9, 1.0 / 3.0});
    EXPECT_EQ(parse_level_csv(report_emit(r, ReportFormat::Csv)), r.levels);
    EXPECT_THROW(parse_report_format("xml"), Error);
}

TEST(Driver, RunConvergesAndIsReproducible) {
    const auto cfg = small_run();
    const auto a = run(cfg);
    const auto b = run(cfg);
    EXPECT_TRUE(a.report.converged);
    EXPECT_EQ(a.report.method, "pcg");
    EXPECT_EQ(a.report.iterations, b.report.iterations);
    EXPECT_EQ(a.solution, b.solution);
    auto ra = a.report, rb = b.report;
    ra.setup_time = rb.setup_time = ra.solve_time = rb.solve_time = ra.total_time = rb.total_time = 0.0;
    EXPECT_EQ(report_emit(ra, ReportFormat::Json), report_emit(rb, ReportFormat::Json));
    EXPECT_GE(a.report.grid_complexity, 1.0);
    EXPECT_EQ(a.report.levels.front().n, 1000);
}

TEST(Driver, MatrixFilesInBothFormats) {
    const auto A = gen_poisson7(6, 6, 6);
    const std::string mtx = ::testing::TempDir() + "clamg_driver.mtx";
    const std::string bin = ::testing::TempDir() + "clamg_driver.bin";
    io::write_matrix_market(mtx, A, true);
    {
        std::ofstream out(bin, std::ios::binary);
        io::write_binary(out, A);
    }
    for (const auto& path : {mtx, bin}) {
        RunConfig cfg;
        cfg.matrix = path;
        EXPECT_EQ(load_problem(cfg).A, A);
        EXPECT_TRUE(run(cfg).report.converged);
    }
    RunConfig missing;
    missing.matrix = ::testing::TempDir() + "does_not_exist.mtx";
    EXPECT_THROW(run(missing), Error);
}

TEST(Driver, RhsSeededAndFromFile) {
    RunConfig cfg = small_run();
    const auto r1 = make_rhs(cfg, 50);
    EXPECT_EQ(r1, make_rhs(cfg, 50));
    for (double v : r1) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    cfg.rhs_seed = 2;
    EXPECT_NE(r1, make_rhs(cfg, 50));

    const std::string path = ::testing::TempDir() + "clamg_rhs.mtx";
    io::write_matrix_market_array(path, MultiVector(5, 1, 2.5));
    cfg.rhs = path;
    EXPECT_EQ(make_rhs(cfg, 5), std::vector<double>(5, 2.5));
    EXPECT_THROW(make_rhs(cfg, 6), Error);
}

TEST(Driver, OperatorFilteringRoutesToBicgstab) {
    RunConfig cfg = small_run();
    cfg.amg.filter_target = FilterTarget::Operator;
    const auto r = run(cfg);
    EXPECT_EQ(r.report.method, "bicgstab");
    EXPECT_TRUE(r.report.converged);
    cfg.method = MethodChoice::Pcg;
    EXPECT_THROW(run(cfg), Error);
}
