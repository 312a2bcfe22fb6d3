#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace rdinv {

/// Uniform space-time grid on [0,length] x [0,horizon].
/// nx counts spatial nodes including both boundaries, nt counts time levels
/// including t=0 and t=horizon.
struct Grid {
    int nx = 0;
    int nt = 0;
    double length = 1.0;
    double horizon = 1.0;

    Grid() = default;
    Grid(int nx_, int nt_, double length_, double horizon_)
        : nx(nx_), nt(nt_), length(length_), horizon(horizon_) {
        if (nx < 9) throw std::invalid_argument("Grid: nx must be >= 9");
        if (nt < 3) throw std::invalid_argument("Grid: nt must be >= 3");
        if (!(length > 0.0) || !(horizon > 0.0))
            throw std::invalid_argument("Grid: length and horizon must be positive");
    }

    double dx() const { return length / (nx - 1); }
    double dt() const { return horizon / (nt - 1); }
    double x(int j) const { return length * j / (nx - 1); }
    double t(int k) const { return horizon * k / (nt - 1); }

    /// Grid with both spacings halved; shares all nodes of this grid.
    Grid refined() const { return Grid(2 * nx - 1, 2 * nt - 1, length, horizon); }
};

/// Dense space-time solution fields for both species plus grid metadata.
/// Entries are guaranteed finite by the solvers; a non-finite value is
/// reported as a failure, never stored.
struct Trajectory {
    Grid grid;
    std::array<std::vector<double>, 2> values;  // [species][k*nx + j]

    Trajectory() = default;
    explicit Trajectory(const Grid& g) : grid(g) {
        values[0].assign(static_cast<size_t>(g.nx) * g.nt, 0.0);
        values[1].assign(static_cast<size_t>(g.nx) * g.nt, 0.0);
    }

    double at(int species, int k, int j) const {
        return values[species][static_cast<size_t>(k) * grid.nx + j];
    }
    double& at(int species, int k, int j) {
        return values[species][static_cast<size_t>(k) * grid.nx + j];
    }
    std::span<const double> level(int species, int k) const {
        return {values[species].data() + static_cast<size_t>(k) * grid.nx,
                static_cast<size_t>(grid.nx)};
    }
    std::span<double> level(int species, int k) {
        return {values[species].data() + static_cast<size_t>(k) * grid.nx,
                static_cast<size_t>(grid.nx)};
    }
};

}  // namespace rdinv
