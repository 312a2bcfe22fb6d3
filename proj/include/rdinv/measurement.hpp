#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rdinv/boundary.hpp"
#include "rdinv/grid.hpp"

namespace rdinv {

enum class MeasurementKind { FinalTime, TimeTrace };

/// Sparse noisy observations: either final-time profiles {x_j -> g(x_j)} or
/// boundary time traces {t_j -> h(t_j)} for both species.
struct Measurement {
    MeasurementKind kind = MeasurementKind::FinalTime;
    Endpoint trace_point = Endpoint::Right;  // time-trace only
    std::vector<double> abscissae;           // strictly increasing, S >= 4
    std::array<std::vector<double>, 2> values;
    double noise_level = 0.0;
    std::uint64_t seed = 0;

    int count() const { return static_cast<int>(abscissae.size()); }
};

/// Samples the trajectory at S near-equally spaced grid nodes (final time:
/// u(.,T); time trace: u(x0,.)) and adds i.i.d. uniform noise on
/// [-delta*max|signal|, +delta*max|signal|] per species. Deterministic per
/// seed: the draw order is all species-0 samples then all species-1 samples.
Measurement sample_measurement(const Trajectory& traj, MeasurementKind kind, int S,
                               double delta, std::uint64_t seed,
                               Endpoint trace_point = Endpoint::Right);

void write_measurement_csv(const Measurement& m, std::ostream& out);
Measurement read_measurement_csv(std::istream& in);

}  // namespace rdinv
