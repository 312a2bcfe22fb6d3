#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "rdinv/inversion.hpp"
#include "rdinv/presets.hpp"

namespace rdinv {

struct SamplingConfig {
    int count = -1;  // auto: 20 spatial, 25 temporal
    double noise = 0.0;
    std::uint64_t seed = 1;
    Endpoint point = Endpoint::Right;
};

struct SmoothingConfig {
    bool enabled = true;
    int ncoef = -1;          // auto: min(S, 20)
    double mu_spatial = -1.0;   // auto: discrepancy principle / 1e-6
    double mu_temporal = -1.0;  // auto: discrepancy principle / 1e-10
};

struct InversionConfig {
    int max_iters = 12;
    double stagnation_tol = 1e-8;
    int ncenters = RangedFn::kDefaultCenters;
    double ridge = -1.0;
};

struct OutputConfig {
    std::string dir = "out";
    bool svg = true;
};

/// Parsed and schema-validated experiment description. Unknown keys are
/// rejected at parse time.
struct ExperimentConfig {
    std::string preset;            // empty when an explicit system is given
    nlohmann::json system;         // raw "system" section (may be empty)
    Grid grid{200, 300, 1.0, 1.0};
    bool grid_given = false;
    MeasurementKind mode = MeasurementKind::TimeTrace;
    bool mode_given = false;
    SamplingConfig sampling;
    SmoothingConfig smoothing;
    InversionConfig inversion;
    OutputConfig output;
};

ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a config file; syntax errors are reported with a line
/// number, schema errors with the offending key path.
ExperimentConfig load_config_file(const std::string& path);

/// The fully assembled experiment: system with truth functions in the
/// unknown slot, grid, and mode.
struct BuiltExperiment {
    SystemSpec spec;
    Grid grid;
    MeasurementKind mode = MeasurementKind::TimeTrace;
    std::array<std::function<double(double)>, 2> truth;  // may be empty
    bool has_truth = false;
    ExperimentConfig cfg;
};

BuiltExperiment build_experiment(const ExperimentConfig& cfg);

/// Compiles an expression string into a univariate slot over `var`
/// with its exact symbolic derivative.
ScalarFn scalar_fn_from_expr(const std::string& text, char var);

}  // namespace rdinv
