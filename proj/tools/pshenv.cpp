// Command-line front end: envelope, berman, capacity, verify, convergence.

#include <iostream>

#include <CLI11.hpp>

#include "pshenv/error.hpp"
#include "pshenv/registry.hpp"
#include "pshenv/run.hpp"

int main(int argc, char** argv) {
    using namespace pshenv;

    CLI::App app{"Plurisubharmonic envelopes with a prescribed Monge-Ampere lower bound"};
    app.require_subcommand(1);

    std::string config_path, out_path, mode_name;
    bool strict = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "output directory (overrides the config)");
    app.add_option("--mode", mode_name, "sweep ordering")->check(CLI::IsMember({"seq", "redblack"}));
    app.add_flag("--strict", strict, "reject unknown config keys instead of warning");

    std::string experiment = "all", spacings;
    auto* envelope = app.add_subcommand("envelope", "envelope of the configured obstacle");
    auto* berman = app.add_subcommand("berman", "envelope by the penalization scheme");
    auto* capacity = app.add_subcommand("capacity", "relative capacity of {capacity_set <= 0}");
    auto* verify = app.add_subcommand("verify", "run one verification experiment, or all of them");
    verify->add_option("experiment", experiment, "experiment name or 'all'");
    bool list = false;
    verify->add_flag("--list", list, "print the experiment names and exit");
    auto* convergence = app.add_subcommand("convergence", "refinement study of the configured problem");
    convergence->add_option("spacings", spacings, "comma-separated spacings, e.g. 1/16,1/32,1/64");
    for (auto* sub : {envelope, berman, capacity, verify, convergence}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    std::string command = app.get_subcommands().front()->get_name();
    if (list) {
        for (const auto& e : experiment_registry()) std::cout << e.name << "  " << e.summary << "\n";
        return 0;
    }
    try {
        RunRequest req;
        req.command = parse_command(command);
        req.argument = command == "verify" ? experiment : command == "convergence" ? spacings : "";
        if (!config_path.empty()) req.config = parse_config(config_path, strict);
        if (!out_path.empty()) req.out = out_path;
        if (!mode_name.empty()) req.mode = parse_sweep_mode(mode_name);
        return run(req, std::cout);
    } catch (const std::exception& e) {
        std::cerr << failure_record(command, e).dump() << std::endl;
        return 2;
    }
}
