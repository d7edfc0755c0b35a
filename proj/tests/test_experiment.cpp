#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pqsd/experiment.hpp"

using namespace pqsd;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const fs::path& dir, const std::string& label) {
    RunConfig cfg;
    cfg.model = ModelSpec::two_level(0.2);
    cfg.corr = CorrelationSpec{1.0, 0.5};
    cfg.t_end = 2.0;
    cfg.dt = 2e-3;
    cfg.n_traj = 400;
    cfg.master_seed = 7;
    cfg.output_directory = dir.string();
    cfg.output_label = label;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir(const char* tag) : path(fs::temp_directory_path() / tag) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run_experiment writes the table and the plot script") {
    TempDir tmp("pqsd_test_run");
    const RunConfig cfg = small_config(tmp.path, "demo");
    const RunArtifacts art = run_experiment(cfg);
    CHECK(!art.quality_failed);
    REQUIRE(fs::exists(art.csv_path));
    REQUIRE(fs::exists(art.plot_path));

    const std::string csv = slurp(art.csv_path);
    CHECK(csv.find("# pqsd result table, format v1") == 0);
    CHECK(csv.find("# [model]") != std::string::npos);  // config echo
    CHECK(csv.find("t,fidelity_mc,stderr_mc,fidelity_analytic,n_traj,divergent_count") !=
          std::string::npos);
    // first data row starts at t = 0 with fidelity 1
    const auto header_end = csv.find("divergent_count\n");
    REQUIRE(header_end != std::string::npos);
    std::istringstream first_row(csv.substr(header_end + 16));
    std::string row;
    std::getline(first_row, row);
    CHECK(row.substr(0, 4) == "0,1,");
}

TEST_CASE("artifacts are byte-identical across reruns and thread counts") {
    TempDir tmp("pqsd_test_repro");
    const RunConfig cfg = small_config(tmp.path, "repro");
    const RunArtifacts a = run_experiment(cfg, 1);
    const std::string first = slurp(a.csv_path);
    const RunArtifacts b = run_experiment(cfg, 3);
    CHECK(slurp(b.csv_path) == first);
    const RunArtifacts c = run_experiment(cfg, 1);
    CHECK(slurp(c.csv_path) == first);
}

TEST_CASE("the analytic column tracks the Monte Carlo mean") {
    TempDir tmp("pqsd_test_analytic");
    RunConfig cfg = small_config(tmp.path, "xcheck");
    cfg.n_traj = 2000;
    cfg.t_end = 4.0;
    const RunArtifacts art = run_experiment(cfg);
    const FidelityCurve& mc = art.ensemble.fidelity;
    for (std::size_t j = 0; j < mc.grid.size(); j += 40) {
        const double ref = curve_at(art.analytic, mc.grid.t(j));
        const double tol = std::max(5.0 * mc.stderr_[j], 2e-3);
        CHECK(std::abs(mc.mean[j] - ref) < tol);
    }
}

TEST_CASE("curve_at interpolates linearly and clamps at the ends") {
    FidelityCurve c;
    c.grid = TimeGrid::uniform(0.0, 2.0, 1.0);
    c.mean = {1.0, 0.5, 0.25};
    CHECK(curve_at(c, -1.0) == 1.0);
    CHECK(curve_at(c, 0.5) == doctest::Approx(0.75));
    CHECK(curve_at(c, 1.5) == doctest::Approx(0.375));
    CHECK(curve_at(c, 9.0) == 0.25);
}

TEST_CASE("sweep writes one table per point plus a summary") {
    TempDir tmp("pqsd_test_sweep");
    RunConfig cfg = small_config(tmp.path, "sw");
    cfg.n_traj = 100;
    const SweepOutcome out = sweep(cfg, "gamma", {0.2, 2.0}, {1.0, 2.0});
    REQUIRE(out.points.size() == 2);
    CHECK(fs::exists(tmp.path / "sw_gamma_0.2.csv"));
    CHECK(fs::exists(tmp.path / "sw_gamma_2.csv"));
    REQUIRE(fs::exists(out.summary_path));
    const std::string summary = slurp(out.summary_path);
    CHECK(summary.find("gamma,fidelity_at_1,stderr_at_1,fidelity_at_2,stderr_at_2") !=
          std::string::npos);
    CHECK(summary.find("\n0.2,") != std::string::npos);
    CHECK(summary.find("\n2,") != std::string::npos);
}

TEST_CASE("sweep rejects bad axes and bad preconditions") {
    TempDir tmp("pqsd_test_sweep_bad");
    RunConfig cfg = small_config(tmp.path, "bad");
    CHECK_THROWS_AS(sweep(cfg, "temperature", {1.0}, {}), ConfigError);
    CHECK_THROWS_AS(sweep(cfg, "gamma", {}, {}), ConfigError);
    CHECK_THROWS_AS(sweep(cfg, "tau_over_delta", {2.0}, {}), ConfigError);  // delta unset
    CHECK_THROWS_AS(sweep(cfg, "N", {3.0}, {}), ConfigError);  // not multi_level
}

TEST_CASE("the self-validation suite passes on a healthy configuration") {
    TempDir tmp("pqsd_test_validate");
    const RunConfig cfg = small_config(tmp.path, "val");
    std::ostringstream report;
    const bool ok = validate_run(cfg, report);
    INFO(report.str());
    CHECK(ok);
    CHECK(report.str().find("validation passed") != std::string::npos);
    CHECK(report.str().find("[FAIL]") == std::string::npos);
}

TEST_CASE("fault injection makes the noise check fail") {
    TempDir tmp("pqsd_test_validate_fault");
    const RunConfig cfg = small_config(tmp.path, "fault");
    std::ostringstream report;
    const bool ok = validate_run(cfg, report, 2.0);
    CHECK(!ok);
    CHECK(report.str().find("[FAIL] noise correlation") != std::string::npos);
    CHECK(report.str().find("validation FAILED") != std::string::npos);
}
