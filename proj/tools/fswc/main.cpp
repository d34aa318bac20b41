#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fswc: Fermi-surface weak-coupling spectral toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int threads = 1;
    std::vector<std::string> overrides;

    const std::vector<std::string> names = {
        "norms",        "vs-spectrum",  "bs-curve",
        "fit",          "second-order", "knapp",
        "kernel-bounds", "spectral-measure-check", "oracle-compare",
        "riesz-count"};
    for (const std::string& n : names) {
        CLI::App* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "configuration file (key=value with [sections])");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker count (numeric results are independent)");
        sub->add_option("--override", overrides, "section.key=value (repeatable)");
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    try {
        fswc::cli::ConfigMap cfg = config_path.empty()
                                       ? fswc::cli::ConfigMap::from_string("")
                                       : fswc::cli::ConfigMap::load(config_path);
        for (const std::string& o : overrides) cfg.apply_override(o);
        fswc::cli::run_command(command, std::move(cfg), out_dir, threads);
        return 0;
    } catch (const fswc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fswc::ResolutionExceeded& e) {
        std::cerr << "resolution exceeded: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        try {
            nlohmann::ordered_json j;
            j["error"] = e.what();
            j["command"] = command;
            std::ofstream f(out_dir + "/error.json");
            f << j.dump(2) << "\n";
        } catch (...) {
        }
        return 3;
    }
}
