#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rdinv/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string mode;
    long long seed = -1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "sampling seed (overrides config)");
    cmd->add_option("--mode", args.mode, "data type (overrides config)")
        ->check(CLI::IsMember({"final-time", "time-trace"}));
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

rdinv::ExperimentConfig load_with_overrides(const CommonArgs& args) {
    rdinv::ExperimentConfig cfg = rdinv::load_config_file(args.config_path);
    if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
    if (args.seed >= 0) cfg.sampling.seed = static_cast<std::uint64_t>(args.seed);
    if (!args.mode.empty()) {
        cfg.mode = args.mode == "final-time" ? rdinv::MeasurementKind::FinalTime
                                             : rdinv::MeasurementKind::TimeTrace;
        cfg.mode_given = true;
    }
    return cfg;
}

std::ostream& log_stream(const CommonArgs& args) {
    static std::ostringstream sink;
    if (args.quiet) {
        sink.str("");
        return sink;
    }
    return std::cout;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled reaction-diffusion simulation and reaction-term reconstruction"};
    app.require_subcommand(1);

    CommonArgs fwd_args, inv_args, sweep_args, diag_args;
    std::string measurement_csv;
    std::vector<double> betas;

    CLI::App* fwd = app.add_subcommand("forward", "solve the system and write snapshots");
    add_common(fwd, fwd_args);

    CLI::App* inv = app.add_subcommand("invert", "reconstruct the unknown pair from data");
    add_common(inv, inv_args);
    inv->add_option("--measurement", measurement_csv,
                    "load a measurement CSV instead of simulating data")
        ->check(CLI::ExistingFile);

    CLI::App* sweep = app.add_subcommand("sweep", "run the inversion across coupling values");
    add_common(sweep, sweep_args);
    sweep->add_option("--beta", betas, "coupling strengths to sweep")->required();

    CLI::App* diag = app.add_subcommand("diagnose", "run the model diagnostics");
    add_common(diag, diag_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fwd->parsed())
            return rdinv::cmd_forward(load_with_overrides(fwd_args), log_stream(fwd_args));
        if (inv->parsed())
            return rdinv::cmd_invert(load_with_overrides(inv_args), log_stream(inv_args),
                                     measurement_csv);
        if (sweep->parsed())
            return rdinv::cmd_sweep(load_with_overrides(sweep_args), betas,
                                    log_stream(sweep_args));
        if (diag->parsed())
            return rdinv::cmd_diagnose(load_with_overrides(diag_args), log_stream(diag_args));
    } catch (const rdinv::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return rdinv::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return rdinv::kExitForwardFailure;
    }
    return rdinv::kExitOk;
}
