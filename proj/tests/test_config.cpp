#include <string>

#include "doctest.h"
#include "pqsd/config.hpp"

using namespace pqsd;

namespace {

const char* kGood = R"(# comment line
[model]
family = qutrit
omega = 1.0
kappa = 1.4142135623730951

[correlation]
Gamma = 1.0
gamma = 0.5   ; trailing comment

[pulse]
enabled = true
tau = 0.08
delta = 0.04
psi = 2.0

[run]
t_end = 4.0
dt = 0.0005
n_traj = 500
master_seed = 42
initial_state = (0.5,0) (0.5,0.5) 0.25

[analytic]
enabled = true
coarsen = 2

[output]
directory = out
label = demo
)";

void expect_error(const std::string& text, const std::string& needle) {
    try {
        parse_config_text(text, "cfg");
        FAIL(("expected ConfigError containing: " + needle).c_str());
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
    }
}

}  // namespace

TEST_CASE("a full config parses with every key applied") {
    const RunConfig cfg = parse_config_text(kGood, "good.cfg");
    CHECK(cfg.model.family == ModelFamily::Qutrit);
    CHECK(cfg.model.omega == 1.0);
    CHECK(cfg.model.kappa == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(cfg.corr.Gamma == 1.0);
    CHECK(cfg.corr.gamma == 0.5);
    CHECK(cfg.pulse.enabled);
    CHECK(cfg.pulse.tau == 0.08);
    CHECK(cfg.pulse.delta == 0.04);
    CHECK(cfg.pulse.psi == 2.0);
    CHECK(cfg.t_end == 4.0);
    CHECK(cfg.dt == 0.0005);
    CHECK(cfg.n_traj == 500);
    CHECK(cfg.master_seed == 42);
    REQUIRE(cfg.initial_state.size() == 3);
    CHECK(cfg.initial_state[1] == cplx(0.5, 0.5));
    CHECK(cfg.initial_state[2] == cplx(0.25, 0.0));
    CHECK(cfg.analytic_enabled);
    CHECK(cfg.analytic_coarsen == 2);
    CHECK(cfg.output_label == "demo");
}

TEST_CASE("defaults survive an almost-empty config") {
    const RunConfig cfg = parse_config_text("[model]\nfamily = two_level\n", "min.cfg");
    CHECK(cfg.t_end == 10.0);
    CHECK(cfg.dt == 1e-3);
    CHECK(cfg.n_traj == 1000);
    CHECK(cfg.master_seed == 1);
    CHECK(cfg.initial_state.empty());
    CHECK(cfg.analytic_enabled);
    CHECK(cfg.output_directory == "out");
}

TEST_CASE("serialize/parse is a faithful round trip") {
    RunConfig cfg = parse_config_text(kGood, "good.cfg");
    const std::string text = serialize_config(cfg);
    const RunConfig back = parse_config_text(text, "reparsed");
    CHECK(serialize_config(back) == text);
    CHECK(back.model.kappa == cfg.model.kappa);
    CHECK(back.dt == cfg.dt);
    CHECK(back.initial_state == cfg.initial_state);
}

TEST_CASE("diagnostics carry the origin and line number") {
    expect_error("[model]\nfamily = two_level\n[orbit]\n", "cfg:3: unknown section '[orbit]'");
    expect_error("[model]\nfamily = two_level\nmass = 3\n", "cfg:3: unknown key 'model.mass'");
    expect_error("[run]\ndt = fast\n", "cfg:2: expected a number for 'run.dt'");
    expect_error("[run]\nn_traj = 10\nn_traj = 20\n", "cfg:3: duplicate key 'run.n_traj'");
    expect_error("t_end = 3\n", "cfg:1: key outside any [section]");
    expect_error("[run]\nt_end\n", "cfg:2: expected 'key = value'");
    expect_error("[run\n", "cfg:1: unterminated section header");
    expect_error("[model]\nfamily = spin_chain\n", "unknown model.family");
    expect_error("[run]\ninitial_state = (1,2 3\n", "bad amplitude list");
}

TEST_CASE("semantic validation failures") {
    expect_error("[run]\ndt = 20\n", "run.dt must satisfy");
    expect_error("[run]\nn_traj = 1\n", "run.n_traj must be >= 2");
    expect_error("[model]\nfamily = multi_level\nN = 0\n", "N must be >= 1");
    expect_error("[pulse]\nenabled = true\ntau = 0.5\ndelta = 0.8\npsi = 1\n",
                 "delta must not exceed tau");
    expect_error("[model]\nfamily = two_level\n[run]\ninitial_state = 1 0 0\n",
                 "model dimension is 2");
    expect_error("[output]\nlabel = a/b\n", "output.label");
    RunConfig cfg;
    cfg.analytic_coarsen = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("make_grid honors pulse alignment") {
    RunConfig cfg = parse_config_text(kGood, "good.cfg");
    const TimeGrid g = cfg.make_grid();
    CHECK(g.t_end() == cfg.t_end);
    bool found = false;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g.t(i) - 0.04) < 1e-12) found = true;
    CHECK(found);  // first pulse edge tau - delta = 0.04
    cfg.pulse.enabled = false;
    const TimeGrid u = cfg.make_grid();
    CHECK(u.size() == static_cast<std::size_t>(cfg.t_end / cfg.dt) + 1);
}

TEST_CASE("parse_config_file reports unreadable paths") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}
