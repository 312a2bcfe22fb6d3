#pragma once

#include <array>
#include <functional>

namespace rdinv {

enum class Endpoint { Left, Right };

enum class BcKind { Dirichlet, Neumann, Robin };

/// One endpoint condition for one species. Neumann and Robin prescribe
/// du/dnu + gamma*u = theta(t) with the outward normal; Dirichlet is the
/// gamma -> infinity limit and imposes the value directly.
struct BoundaryCondition {
    BcKind kind = BcKind::Neumann;
    double gamma = 0.0;
    std::function<double(double)> data;  // value(t) or theta(t); empty means 0

    double at(double t) const { return data ? data(t) : 0.0; }

    static BoundaryCondition dirichlet(std::function<double(double)> value = {}) {
        return {BcKind::Dirichlet, 0.0, std::move(value)};
    }
    static BoundaryCondition neumann(std::function<double(double)> theta = {}) {
        return {BcKind::Neumann, 0.0, std::move(theta)};
    }
    static BoundaryCondition robin(double gamma, std::function<double(double)> theta = {}) {
        return {BcKind::Robin, gamma, std::move(theta)};
    }
};

/// Per-species, per-endpoint boundary conditions.
struct BoundarySpec {
    std::array<std::array<BoundaryCondition, 2>, 2> conditions{};  // [species][endpoint]

    const BoundaryCondition& at(int species, Endpoint e) const {
        return conditions[species][e == Endpoint::Left ? 0 : 1];
    }
    BoundaryCondition& at(int species, Endpoint e) {
        return conditions[species][e == Endpoint::Left ? 0 : 1];
    }
};

}  // namespace rdinv
