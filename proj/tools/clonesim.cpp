// Command-line front end: dist, sweep, witness, reproduce.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clonesim/cli.hpp"

namespace {

using clonesim::cli::RunConfig;
using clonesim::report::PiFraction;

struct AngleArgs {
    std::string theta_a = "1/2", phi_a = "0", theta_b = "1/2", phi_b = "0";
    std::optional<std::string> dphi;

    void add_to(CLI::App* app) {
        app->add_option("--theta-a", theta_a, "micro polar angle, in units of pi")->capture_default_str();
        app->add_option("--phi-a", phi_a, "micro azimuth, in units of pi")->capture_default_str();
        app->add_option("--theta-b", theta_b, "macro polar angle, in units of pi")->capture_default_str();
        app->add_option("--phi-b", phi_b, "macro azimuth, in units of pi")->capture_default_str();
        app->add_option("--dphi", dphi, "phi_a - phi_b in units of pi (sets phi_b = 0)");
    }

    void apply(RunConfig& c) const {
        c.theta_a = PiFraction::parse(theta_a);
        c.theta_b = PiFraction::parse(theta_b);
        if (dphi) {
            c.phi_a = PiFraction::parse(*dphi);
            c.phi_b = PiFraction{0, 1};
        } else {
            c.phi_a = PiFraction::parse(phi_a);
            c.phi_b = PiFraction::parse(phi_b);
        }
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Micro-macro cloner photon-counting simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", clonesim::kVersion);

    RunConfig cfg;
    AngleArgs dist_angles, sweep_angles;
    std::string model = "unitary", model_a = "unitary", model_b = "mp-sq";
    int N = 0;

    auto* dist = app.add_subcommand("dist", "photon-count distribution of one cloner model");
    dist->add_option("--model", model, "unitary | mp-eq | mp-sq")->capture_default_str();
    dist->add_option("--N", N, "total photon number")->required();
    dist->add_option("--tau", cfg.tau, "retained term pairs of mp-sq")->capture_default_str();
    dist->add_option("--out", cfg.output, "output file (stdout if omitted)");
    dist->add_option("--format", cfg.format, "csv | json")->capture_default_str();
    dist->add_flag("--allow-approx-N", cfg.allow_approx_N, "raise an even N to N+1 for odd-only models");
    dist_angles.add_to(dist);

    auto* sweep = app.add_subcommand("sweep", "coarse-grained Manhattan distance between two models");
    sweep->add_option("--model-a", model_a)->capture_default_str();
    sweep->add_option("--model-b", model_b)->capture_default_str();
    sweep->add_option("--Ns", cfg.Ns, "photon numbers")->required()->delimiter(',');
    sweep->add_option("--sigmas", cfg.sigmas, "odd bin sizes")->required()->delimiter(',');
    sweep->add_option("--tau", cfg.tau)->capture_default_str();
    sweep->add_option("--out", cfg.output, "output CSV (stdout if omitted)");
    sweep->add_option("--format", cfg.format, "csv | svg+csv")->capture_default_str();
    sweep->add_flag("--allow-approx-N", cfg.allow_approx_N);
    sweep_angles.add_to(sweep);

    auto* witness = app.add_subcommand("witness", "spin-correlation entanglement witness");
    witness->add_option("--model", model, "unitary | mp-eq | mp-sq")->capture_default_str();
    witness->add_option("--gain", cfg.gain, "amplifier gain g (unitary)")->capture_default_str();
    witness->add_option("--cutoff", cfg.cutoff, "max photon pairs per mode (unitary)")->capture_default_str();
    witness->add_option("--N", N, "total photon number (measure-and-prepare)");
    witness->add_option("--tau", cfg.tau)->capture_default_str();
    witness->add_option("--out", cfg.output, "output JSON (stdout if omitted)");
    witness->add_flag("--allow-approx-N", cfg.allow_approx_N);

    auto* reproduce = app.add_subcommand("reproduce", "regenerate figure datasets");
    reproduce->add_option("figure", cfg.figure, "fig2 | fig3")->required();
    reproduce->add_option("--out", cfg.output, "output directory")->required();
    reproduce->add_option("--N", cfg.Ns, "override photon number(s)")->delimiter(',');
    reproduce->add_option("--sigmas", cfg.sigmas, "override bin sizes (fig3)")->delimiter(',');
    reproduce->add_option("--tau", cfg.tau)->capture_default_str();
    reproduce->add_flag("--allow-approx-N", cfg.allow_approx_N);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : clonesim::cli::kExitUsage;
    }

    try {
        if (dist->parsed()) {
            cfg.command = "dist";
            cfg.models = {model};
            cfg.Ns = {N};
            dist_angles.apply(cfg);
        } else if (sweep->parsed()) {
            cfg.command = "sweep";
            cfg.models = {model_a, model_b};
            sweep_angles.apply(cfg);
        } else if (witness->parsed()) {
            cfg.command = "witness";
            cfg.models = {model};
            if (N > 0) cfg.Ns = {N};
        } else {
            cfg.command = "reproduce";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return clonesim::cli::kExitUsage;
    }
    return clonesim::cli::run(cfg, std::cout, std::cerr);
}
