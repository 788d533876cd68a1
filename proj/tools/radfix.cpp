// radfix <solve|certify|verify|sweep> --config <path> [--mass-list m1,m2,...]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "radfix/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Radial stationary profiles of self-gravitating particles: Picard solver and contraction certifier"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<double> masses;

    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config_path, "run configuration")->required(); };
    CLI::App* solve = app.add_subcommand("solve", "Picard iteration to a stationary profile");
    CLI::App* certify = app.add_subcommand("certify", "contraction certificate and empirical estimate check");
    CLI::App* verify = app.add_subcommand("verify", "cross-check the Picard profile against the shooting oracle");
    CLI::App* sweep = app.add_subcommand("sweep", "solve over a list of masses");
    for (CLI::App* sub : {solve, certify, verify, sweep}) {
        add_config(sub);
    }
    sweep->add_option("--mass-list", masses, "comma-separated masses")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : radfix::cli::config_error;
    }

    std::vector<std::string> problems;
    radfix::RunConfig cfg;
    try {
        cfg = radfix::load_config(config_path, &problems);
    } catch (const radfix::ConfigError& e) {
        std::cerr << "radfix: " << e.what() << "\n";
        return radfix::cli::config_error;
    }
    if (!problems.empty()) {
        std::string message = "invalid config:";
        for (const auto& p : problems) {
            message += "\n  " + p;
        }
        std::cerr << "radfix: " << message << "\n";
        radfix::Json report;
        report["error"] = radfix::error_json(radfix::cli::config_error, "config", message);
        try {
            radfix::write_text(cfg.report_json, radfix::to_json_text(report));
        } catch (const std::exception& e) {
            std::cerr << "radfix: " << e.what() << "\n";
        }
        return radfix::cli::config_error;
    }

    int code = radfix::cli::ok;
    try {
        if (solve->parsed()) {
            code = radfix::cli::cmd_solve(cfg);
        } else if (certify->parsed()) {
            code = radfix::cli::cmd_certify(cfg);
        } else if (verify->parsed()) {
            code = radfix::cli::cmd_verify(cfg);
        } else {
            code = radfix::cli::cmd_sweep(cfg, masses);
        }
    } catch (const std::exception& e) {
        std::cerr << "radfix: " << e.what() << "\n";
        return radfix::cli::config_error;
    }
    if (code != radfix::cli::ok) {
        std::cerr << "radfix: exit " << code << ", see " << cfg.report_json << "\n";
    }
    return code;
}
