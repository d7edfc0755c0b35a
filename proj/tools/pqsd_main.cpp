#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pqsd/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitQualityFailure = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pqsd - stochastic simulator for pulse-controlled open-system subspaces"};
    app.require_subcommand(1);

    int threads = 1;
    std::string out_dir;
    app.add_option("--threads", threads, "worker threads for the trajectory ensemble")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory (overrides output.directory)");

    std::string run_config;
    CLI::App* run = app.add_subcommand("run", "execute one configured experiment");
    run->fallthrough();  // let the global --threads/--out follow the subcommand
    run->add_option("config", run_config, "config file")->required();

    std::string sweep_config, axis;
    std::vector<double> values, checkpoints;
    CLI::App* sw = app.add_subcommand("sweep", "run one experiment per axis value");
    sw->fallthrough();
    sw->add_option("config", sweep_config, "config file")->required();
    sw->add_option("--axis", axis, "swept parameter: gamma | tau_over_delta | psi | N")
        ->required();
    sw->add_option("--values", values, "axis values")->required()->expected(-1);
    sw->add_option("--checkpoints", checkpoints,
                   "times reported in the summary CSV (default: t_end)")
        ->expected(-1);

    std::string val_config;
    double noise_scale = 1.0;
    CLI::App* val = app.add_subcommand("validate", "run the self-validation suite");
    val->fallthrough();
    val->add_option("config", val_config, "config file")->required();
    val->add_option("--noise-scale", noise_scale,
                    "fault-injection hook: scale the noise innovations (self-test)")
        ->group("");  // hidden

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const pqsd::RunConfig cfg = pqsd::parse_config_file(run_config);
            const pqsd::RunArtifacts art = pqsd::run_experiment(cfg, threads, out_dir);
            std::cout << "wrote " << art.csv_path << " and " << art.plot_path << "\n";
            if (art.quality_failed) {
                std::cerr << "error: " << art.ensemble.divergent_count
                          << " divergent trajectories exceed the 1% budget\n";
                return kExitQualityFailure;
            }
            return kExitOk;
        }
        if (sw->parsed()) {
            const pqsd::RunConfig cfg = pqsd::parse_config_file(sweep_config);
            const pqsd::SweepOutcome outcome =
                pqsd::sweep(cfg, axis, values, checkpoints, threads, out_dir);
            for (const pqsd::RunArtifacts& art : outcome.points)
                std::cout << "wrote " << art.csv_path << "\n";
            std::cout << "wrote " << outcome.summary_path << "\n";
            if (outcome.quality_failed) {
                std::cerr << "error: a sweep point exceeded the divergent-trajectory budget\n";
                return kExitQualityFailure;
            }
            return kExitOk;
        }
        const pqsd::RunConfig cfg = pqsd::parse_config_file(val_config);
        return pqsd::validate_run(cfg, std::cout, noise_scale) ? kExitOk
                                                               : kExitValidationFailure;
    } catch (const pqsd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
