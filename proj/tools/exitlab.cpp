// exitlab: command-line front end for the exit-time experiments.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "exitlab/cli.hpp"

int main(int argc, char** argv) {
    using namespace exitlab;

    CLI::App app{"Self-interacting diffusion experiments: trajectories, exit times, Gibbs fixed points"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt, sigma;
    std::optional<std::size_t> replicas;
    cli::RunOptions opt;
    std::string out_dir;

    const char* names[][2] = {
        {"simulate", "One trajectory: decimated states, Lyapunov energy, final W_2k(mu_t, delta_m)"},
        {"exit-scan", "Exit times over a sigma ladder and the Arrhenius fit"},
        {"gibbs", "Self-consistent density by damped fixed-point iteration"},
        {"flow-compare", "Mean sup distance between the diffusion and its zero-noise flow"},
        {"coupling-check", "Sup distance between X and the frozen-measure diffusion Y"},
        {"check-hypotheses", "Sampled verification of the standing hypotheses on V and W"},
    };
    for (const auto& [name, help] : names) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Master seed (overrides config)");
        sub->add_option("--threads", opt.threads, "Worker threads (default: EXITLAB_THREADS, else hardware)");
        sub->add_option("--out-dir", out_dir, "Output directory (overrides config out_dir)");
        sub->add_flag("--allow-unverified", opt.allow_unverified, "Run even if the hypothesis check fails");
        sub->add_option("--dt", dt, "Time step (overrides config)");
        sub->add_option("--sigma", sigma, "Noise level (overrides config)");
        sub->add_option("--replicas", replicas, "Replica count (overrides config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::config_error);
    }
    const std::string name = app.get_subcommands().front()->get_name();

    try {
        auto cfg = cli::Config::load(config_path);
        auto& doc = cfg.doc();
        if (seed) doc["seed"] = *seed;
        if (dt) doc["dt"] = *dt;
        if (sigma) {
            doc["sigma"] = *sigma;
            if (name == "flow-compare") doc.erase("sigma_ladder");
        }
        if (replicas) doc["replicas"] = *replicas;
        opt.out_dir = !out_dir.empty() ? out_dir : cfg.get<std::string>("out_dir", "out");
        return cli::run_subcommand(name, cfg, opt);
    } catch (const Error& e) {
        std::cerr << "exitlab " << name << ": " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "exitlab " << name << ": " << e.what() << "\n";
        return static_cast<int>(ExitCode::numerical_error);
    }
}
