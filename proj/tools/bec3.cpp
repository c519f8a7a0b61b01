#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "bec3/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bec3 - dilute Bose gases with three-body interactions: scattering energies, "
                 "Gross-Pitaevskii minimization, Bogoliubov spectra, dilute expansions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    long seed = -1;
    int workers = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "path to the run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "seed (overrides the config)");
        sub->add_option("--workers", workers, "worker count (overrides the config)");
    };
    CLI::App* scatter = app.add_subcommand("scatter", "zero-scattering and modified scattering energies");
    CLI::App* gpc = app.add_subcommand("gp", "Gross-Pitaevskii ground-state minimization");
    CLI::App* bog = app.add_subcommand("bogoliubov", "excitation spectrum at a GP minimizer");
    CLI::App* expand = app.add_subcommand("expand", "dilute-limit energy expansions");
    CLI::App* verify = app.add_subcommand("verify", "built-in cross-module invariant suite");
    for (CLI::App* sub : {scatter, gpc, bog, expand, verify}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    const std::string chosen = app.get_subcommands().front()->get_name();
    std::string dir_for_errors = out_dir.empty() ? "out" : out_dir;
    try {
        bec3::config::RunConfig cfg = bec3::config::load_config(config_path);
        if (bec3::config::command_name(cfg.command) != chosen)
            throw bec3::ConfigError("config command '" + bec3::config::command_name(cfg.command) +
                                    "' does not match the CLI subcommand '" + chosen + "'");
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        if (seed >= 0) {
            cfg.output.seed = std::uint64_t(seed);
            cfg.minimize.seed = cfg.output.seed;
        }
        if (workers > 0) {
            cfg.output.workers = workers;
            cfg.minimize.workers = workers;
        }
        dir_for_errors = cfg.output.directory;
        return bec3::runner::run(cfg);
    } catch (const bec3::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        bec3::runner::write_error_record(dir_for_errors, "config", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        bec3::runner::write_error_record(dir_for_errors, "solver", e.what());
        return 1;
    }
}
