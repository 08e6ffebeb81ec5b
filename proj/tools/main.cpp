// rotorlab command line: run experiments, sweep parameters, emit plot data.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "rotorlab/harness.hpp"

namespace {

// exit codes: 0 success, 2 config error, 3 numerical error, 4 partial sweep failure
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_partial = 4;

rotorlab::harness::RunConfig load_config(const std::string& path,
                                         const std::vector<std::string>& sets,
                                         std::optional<std::uint64_t> seed,
                                         const std::string& out) {
    auto cfg = rotorlab::harness::RunConfig::from_file(path);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw rotorlab::ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.out_dir = out;
    return cfg;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotorlab: kicked-rotor simulation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, axis, values_csv, manifest_path, figure;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--set", sets, "override key=value")->take_all();
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "run one experiment over an axis of values");
    sweep->add_option("config", config_path, "config file")->required();
    sweep->add_option("--axis", axis, "config key to sweep")->required();
    sweep->add_option("--values", values_csv, "comma-separated values")->required();
    sweep->add_option("--set", sets, "override key=value")->take_all();
    sweep->add_option("--seed", seed, "RNG seed");
    sweep->add_option("--out", out_dir, "output directory");

    auto* plot = app.add_subcommand("plotdata", "emit a plot-ready bundle from a manifest");
    plot->add_option("manifest", manifest_path, "manifest.json of a finished run")->required();
    plot->add_option("--figure", figure, "figure id")->required();

    auto* list = app.add_subcommand("list-experiments", "list registered experiments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto cfg = load_config(config_path, sets, seed, out_dir);
            auto manifest = rotorlab::harness::run_experiment(cfg);
            std::cout << manifest.string() << "\n";
            return 0;
        }
        if (sweep->parsed()) {
            auto cfg = load_config(config_path, sets, seed, out_dir);
            auto outcome = rotorlab::harness::sweep(cfg, axis, split_csv(values_csv));
            std::cout << outcome.table.string() << "\n";
            if (outcome.n_failed > 0) {
                std::cerr << outcome.n_failed << "/" << outcome.n_total
                          << " sweep children failed\n";
                return exit_partial;
            }
            return 0;
        }
        if (plot->parsed()) {
            auto bundle = rotorlab::harness::emit_plotdata(manifest_path, figure);
            std::cout << bundle.string() << "\n";
            return 0;
        }
        if (list->parsed()) {
            for (const auto& e : rotorlab::harness::experiment_registry()) {
                std::printf("%-26s %s\n", e.name.c_str(), e.summary.c_str());
            }
            return 0;
        }
    } catch (const rotorlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const rotorlab::RotorError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
    return 0;
}
