#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pqsd/experiment.hpp"

namespace py = pybind11;
using namespace pqsd;

namespace {

EnsembleResult py_run_mc(const RunConfig& cfg, int threads) {
    cfg.validate();
    const TimeGrid grid = cfg.make_grid();
    const TrajectoryContext ctx =
        TrajectoryContext::build(cfg.model, cfg.corr, cfg.make_detuning(), grid);
    EnsembleOptions opts;
    opts.n_traj = cfg.n_traj;
    opts.master_seed = cfg.master_seed;
    opts.threads = threads;
    opts.initial_state = cfg.initial_state;
    return ensemble_fidelity(ctx, opts);
}

FidelityCurve py_analytic(const RunConfig& cfg) {
    cfg.validate();
    const TimeGrid grid = cfg.make_grid();
    const TrajectoryContext ctx =
        TrajectoryContext::build(cfg.model, cfg.corr, cfg.make_detuning(), grid);
    return analytic_fidelity(cfg, ctx);
}

std::pair<bool, std::string> py_validate(const RunConfig& cfg, double noise_scale) {
    std::ostringstream report;
    const bool ok = validate_run(cfg, report, noise_scale);
    return {ok, report.str()};
}

std::pair<std::vector<double>, std::vector<std::complex<double>>> py_sample_path(
    const CorrelationSpec& corr, double t_end, double dt, std::uint64_t seed) {
    const NoisePath path = sample_path(corr, TimeGrid::uniform(0.0, t_end, dt), seed);
    return {path.grid.points(), path.samples};
}

}  // namespace

PYBIND11_MODULE(_pqsd, m) {
    m.doc() = "stochastic simulator for pulse-controlled open-system subspaces";

    py::enum_<ModelFamily>(m, "ModelFamily")
        .value("TwoLevel", ModelFamily::TwoLevel)
        .value("Qutrit", ModelFamily::Qutrit)
        .value("MultiLevel", ModelFamily::MultiLevel);

    py::class_<ModelSpec>(m, "ModelSpec")
        .def_static("two_level", &ModelSpec::two_level, py::arg("omega"))
        .def_static("qutrit", &ModelSpec::qutrit, py::arg("omega"), py::arg("kappa"))
        .def_static("multi_level", &ModelSpec::multi_level, py::arg("omega"), py::arg("N"))
        .def_readwrite("family", &ModelSpec::family)
        .def_readwrite("omega", &ModelSpec::omega)
        .def_readwrite("kappa", &ModelSpec::kappa)
        .def_readwrite("N", &ModelSpec::N)
        .def_property_readonly("dimension", &ModelSpec::dimension);

    py::class_<CorrelationSpec>(m, "CorrelationSpec")
        .def(py::init([](double Gamma, double gamma) {
                 return CorrelationSpec{Gamma, gamma};
             }),
             py::arg("Gamma"), py::arg("gamma"))
        .def_readwrite("Gamma", &CorrelationSpec::Gamma)
        .def_readwrite("gamma", &CorrelationSpec::gamma)
        .def("alpha", &CorrelationSpec::alpha, py::arg("t"), py::arg("s"));

    py::class_<PulseTrain>(m, "PulseTrain")
        .def(py::init<>())
        .def_readwrite("tau", &PulseTrain::tau)
        .def_readwrite("delta", &PulseTrain::delta)
        .def_readwrite("psi", &PulseTrain::psi)
        .def_readwrite("enabled", &PulseTrain::enabled);

    py::class_<FidelityCurve>(m, "FidelityCurve")
        .def_property_readonly("t", [](const FidelityCurve& c) { return c.grid.points(); })
        .def_readonly("mean", &FidelityCurve::mean)
        .def_readonly("stderr", &FidelityCurve::stderr_)
        .def_readonly("n_traj", &FidelityCurve::n_traj);

    py::class_<EnsembleResult>(m, "EnsembleResult")
        .def_readonly("fidelity", &EnsembleResult::fidelity)
        .def_readonly("norm_sq", &EnsembleResult::norm_sq)
        .def_readonly("divergent_count", &EnsembleResult::divergent_count)
        .def_readonly("failed", &EnsembleResult::failed);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("model", &RunConfig::model)
        .def_readwrite("corr", &RunConfig::corr)
        .def_readwrite("pulse", &RunConfig::pulse)
        .def_readwrite("t_end", &RunConfig::t_end)
        .def_readwrite("dt", &RunConfig::dt)
        .def_readwrite("n_traj", &RunConfig::n_traj)
        .def_readwrite("master_seed", &RunConfig::master_seed)
        .def_readwrite("initial_state", &RunConfig::initial_state)
        .def_readwrite("analytic_enabled", &RunConfig::analytic_enabled)
        .def_readwrite("analytic_coarsen", &RunConfig::analytic_coarsen)
        .def_readwrite("output_directory", &RunConfig::output_directory)
        .def_readwrite("output_label", &RunConfig::output_label)
        .def("validate", &RunConfig::validate);

    py::register_exception<ConfigError>(m, "ConfigError");

    m.def("parse_config", &parse_config_text, py::arg("text"), py::arg("origin") = "<config>",
          "Parse the sectioned key=value config format.");
    m.def("parse_config_file", &parse_config_file, py::arg("path"));
    m.def("serialize_config", &serialize_config, py::arg("config"));
    m.def("ensemble_fidelity", &py_run_mc, py::arg("config"), py::arg("threads") = 1,
          "Monte-Carlo fidelity ensemble for a config (deterministic for a fixed seed).");
    m.def("analytic_fidelity", &py_analytic, py::arg("config"),
          "Closed-form fidelity curve for the config's model family.");
    m.def("run_experiment",
          [](const RunConfig& cfg, int threads, const std::string& out) {
              const RunArtifacts art = run_experiment(cfg, threads, out);
              return py::make_tuple(art.csv_path, art.plot_path, art.quality_failed);
          },
          py::arg("config"), py::arg("threads") = 1, py::arg("out_dir") = "",
          "Run and persist one experiment; returns (csv_path, plot_path, quality_failed).");
    m.def("validate", &py_validate, py::arg("config"), py::arg("noise_scale") = 1.0,
          "Self-validation suite; returns (ok, report).");
    m.def("sample_noise_path", &py_sample_path, py::arg("corr"), py::arg("t_end"), py::arg("dt"),
          py::arg("seed"), "One colored-noise realization; returns (times, samples).");
    m.def("mix_seed", &mix_seed, py::arg("master_seed"), py::arg("index"));
}
