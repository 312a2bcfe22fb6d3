#pragma once

#include <functional>
#include <string>

#include "rdinv/grid.hpp"
#include "rdinv/measurement.hpp"
#include "rdinv/system_spec.hpp"

namespace rdinv {

/// Tunable parameters of the named experiment presets.
struct PresetParams {
    double beta = -1.0;     // f-pair coupling strength
    double beta_u = 1.0;    // phi-pair multipliers
    double beta_v = 1.0;
    std::string coupling = "uv";  // "uv" or "u2v"
    double horizon = 1.0;
    double flux_u = 0.0;    // right-end influx ramp theta(t) = flux * t
    double flux_v = 0.0;
    double eigen_c = 1.0;   // reaction slope of the eigen preset
};

struct ExperimentPreset {
    std::string name;
    SystemSpec spec;  // unknown slot holds the truth functions
    Grid grid;
    MeasurementKind default_mode = MeasurementKind::TimeTrace;
    std::array<std::function<double(double)>, 2> truth;
};

/// Available presets:
///   "example1-eigen"    — decoupled linear pair u_t = u_xx + c u on the
///                         first eigenfunction; has a closed-form solution.
///   "competing-species" — f-pair target system with coupling beta*u*v and
///                         polynomial/Gaussian-bump reactions.
///   "interaction-phi"   — phi-pair target system with known logistic
///                         reactions and arctan/saturating-cubic couplings.
ExperimentPreset make_preset(const std::string& name, const PresetParams& params);

/// Closed-form solution of the eigen preset, u(x,t) = exp(-(lambda-c) t) phi(x).
double eigen_preset_solution(double x, double t, double c);
double eigen_preset_lambda();

}  // namespace rdinv
