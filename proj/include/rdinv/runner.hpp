#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "rdinv/config.hpp"
#include "rdinv/diagnostics.hpp"

namespace rdinv {

/// CLI exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitDiverged = 2,
    kExitForwardFailure = 3,
    kExitConfigError = 64,
};

/// Everything one reconstruction run produces.
struct PipelineResult {
    Trajectory data_trajectory;
    Measurement measurement;
    SmoothedData smoothed;
    std::array<double, 2> margins{0.0, 0.0};
    InverseProblem problem;  // spec/grid/data actually used
    ReconstructionResult reconstruction;
};

/// Simulate data (or take a pre-loaded measurement), smooth, and run the
/// fixed-point reconstruction from the zero initial guess.
PipelineResult run_inversion_pipeline(const BuiltExperiment& exp,
                                      std::optional<Measurement> loaded = std::nullopt);

/// Assembled problem without running the iteration (shared setup path).
InverseProblem prepare_problem(const BuiltExperiment& exp,
                               std::optional<Measurement> loaded = std::nullopt,
                               Trajectory* data_traj_out = nullptr,
                               Measurement* measurement_out = nullptr);

int cmd_forward(const ExperimentConfig& cfg, std::ostream& log);
int cmd_invert(const ExperimentConfig& cfg, std::ostream& log,
               const std::string& measurement_csv = "");
int cmd_sweep(const ExperimentConfig& cfg, const std::vector<double>& betas,
              std::ostream& log);
int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log);

/// Writers shared by the CLI and the acceptance suite.
void write_inversion_artifacts(const PipelineResult& r, const BuiltExperiment& exp,
                               const std::filesystem::path& dir, bool svg);

int verdict_exit_code(const ReconstructionResult& rec);

}  // namespace rdinv
