#pragma once

#include <array>
#include <vector>

#include "rdinv/grid.hpp"
#include "rdinv/system_spec.hpp"

namespace rdinv {

struct SolverOptions {
    double newton_tol = 1e-10;
    int max_newton_iters = 25;
    double blowup_cap = 1e6;
};

using Fields = std::array<std::vector<double>, 2>;  // per-species spatial fields

/// One Crank-Nicolson step of the coupled system from time t to t+dt.
/// The nonlinear terms are treated implicitly via Newton iteration on the
/// coupled two-species block with an analytic Jacobian; second-order
/// consistent in dt and dx. Throws NewtonDivergence / BlowUp.
Fields cn_step(const Fields& state, double t, double dt, const SystemSpec& spec,
               const Grid& grid, const SolverOptions& opts = {});

/// Plain Crank-Nicolson sweep on one grid (second order).
Trajectory solve_single_grid(const SystemSpec& spec, const Grid& grid,
                             const SolverOptions& opts = {});

/// Richardson-extrapolated solution: solves on (dx,dt) and (dx/2,dt/2) and
/// combines the restricted fields as (4*fine - coarse)/3 on the coarse grid,
/// fourth-order accurate for smooth solutions.
Trajectory solve_forward(const SystemSpec& spec, const Grid& grid,
                         const SolverOptions& opts = {});

/// One-sided 4-point backward difference in time at t = T, O(dt^3).
Fields time_derivative_at_T(const Trajectory& traj);

/// (L u)(x0, t) = a u_xx - q u at a boundary node for every time level,
/// via the one-sided 5-point second-derivative stencil.
Fields laplacian_at_boundary(const Trajectory& traj, Endpoint endpoint,
                             const SystemSpec& spec);

/// Outward flux a du/dnu at a boundary node for every time level (used when
/// the measured endpoint carries Dirichlet data).
Fields boundary_flux(const Trajectory& traj, Endpoint endpoint, const SystemSpec& spec);

}  // namespace rdinv
