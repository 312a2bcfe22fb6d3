#include "rdinv/forward_solver.hpp"

#include <cmath>
#include <cstring>

#include "rdinv/errors.hpp"

namespace rdinv {

namespace {

// 2x2 blocks stored row-major: {a00, a01, a10, a11}.
struct Block {
    double a[4];
};

// Solves M x = b by Cramer's rule. The expression pattern is symmetric under
// simultaneous swap of species indices in M and b, which keeps species-swapped
// runs bit-identical.
inline void solve2(const Block& m, const double b[2], double x[2]) {
    const double det = m.a[0] * m.a[3] - m.a[1] * m.a[2];
    x[0] = (m.a[3] * b[0] - m.a[1] * b[1]) / det;
    x[1] = (m.a[0] * b[1] - m.a[2] * b[0]) / det;
}

inline Block solve2_block(const Block& m, const Block& rhs) {
    Block out;
    const double det = m.a[0] * m.a[3] - m.a[1] * m.a[2];
    out.a[0] = (m.a[3] * rhs.a[0] - m.a[1] * rhs.a[2]) / det;
    out.a[2] = (m.a[0] * rhs.a[2] - m.a[2] * rhs.a[0]) / det;
    out.a[1] = (m.a[3] * rhs.a[1] - m.a[1] * rhs.a[3]) / det;
    out.a[3] = (m.a[0] * rhs.a[3] - m.a[2] * rhs.a[1]) / det;
    return out;
}

// Block-tridiagonal Thomas solve with diagonal 2x2 off-blocks.
// lower/upper hold per-node per-species couplings to the previous/next node.
class BlockTridiagonal {
public:
    void resize(int n) {
        diag.resize(n);
        lower.resize(n);
        upper.resize(n);
        carry_.resize(n);
        rhs_.resize(n);
    }

    std::vector<Block> diag;
    std::vector<std::array<double, 2>> lower, upper;

    void solve(std::vector<std::array<double, 2>>& b) {
        const int n = static_cast<int>(diag.size());
        Block m = diag[0];
        carry_[0] = solve2_block(m, {upper[0][0], 0.0, 0.0, upper[0][1]});
        solve2(m, b[0].data(), rhs_[0].data());
        for (int j = 1; j < n; ++j) {
            m = diag[j];
            m.a[0] -= lower[j][0] * carry_[j - 1].a[0];
            m.a[1] -= lower[j][0] * carry_[j - 1].a[1];
            m.a[2] -= lower[j][1] * carry_[j - 1].a[2];
            m.a[3] -= lower[j][1] * carry_[j - 1].a[3];
            double r[2] = {b[j][0] - lower[j][0] * rhs_[j - 1][0],
                           b[j][1] - lower[j][1] * rhs_[j - 1][1]};
            if (j < n - 1) carry_[j] = solve2_block(m, {upper[j][0], 0.0, 0.0, upper[j][1]});
            solve2(m, r, rhs_[j].data());
        }
        b[n - 1] = rhs_[n - 1];
        for (int j = n - 2; j >= 0; --j) {
            // Grouped products keep the arithmetic symmetric under a species
            // swap (addition commutes bitwise, subtraction order does not).
            b[j][0] = rhs_[j][0] -
                      (carry_[j].a[0] * b[j + 1][0] + carry_[j].a[1] * b[j + 1][1]);
            b[j][1] = rhs_[j][1] -
                      (carry_[j].a[2] * b[j + 1][0] + carry_[j].a[3] * b[j + 1][1]);
        }
    }

private:
    std::vector<Block> carry_;
    std::vector<std::array<double, 2>> rhs_;
};

struct NodeBc {
    bool dirichlet = false;
    double gamma = 0.0;
    const BoundaryCondition* bc = nullptr;
};

// Spatial operator a u_xx - q u with ghost nodes eliminated through the
// boundary identity du/dnu + gamma u = theta(t).
class SpatialOperator {
public:
    SpatialOperator(const SystemSpec& spec, const Grid& grid) : spec_(spec), grid_(grid) {
        q_.resize(grid.nx);
        for (int j = 0; j < grid.nx; ++j) q_[j] = spec.q_at(grid.x(j));
        for (int s = 0; s < 2; ++s) {
            for (Endpoint e : {Endpoint::Left, Endpoint::Right}) {
                const BoundaryCondition& bc = spec.bc.at(s, e);
                NodeBc nb;
                nb.bc = &bc;
                nb.dirichlet = bc.kind == BcKind::Dirichlet;
                nb.gamma = bc.kind == BcKind::Robin ? bc.gamma : 0.0;
                node_bc_[s][e == Endpoint::Left ? 0 : 1] = nb;
            }
        }
    }

    bool is_dirichlet(int s, int j) const {
        if (j == 0) return node_bc_[s][0].dirichlet;
        if (j == grid_.nx - 1) return node_bc_[s][1].dirichlet;
        return false;
    }

    double dirichlet_value(int s, int j, double t) const {
        return node_bc_[s][j == 0 ? 0 : 1].bc->at(t);
    }

    /// (L y)_j for one species; boundary rows use the ghost-eliminated form
    /// plus a one-sided third-derivative correction that removes the O(dx)
    /// truncation of the plain ghost closure. The correction stays out of
    /// the Jacobian (deferred), which keeps the system block-tridiagonal;
    /// Newton still converges on the corrected residual.
    double apply(int s, const double* y, int j, double t) const {
        const double a = spec_.diffusion;
        const double dx = grid_.dx();
        const int m = grid_.nx - 1;
        double uxx;
        if (j == 0 || j == m) {
            const NodeBc& nb = node_bc_[s][j == 0 ? 0 : 1];
            const int step = j == 0 ? 1 : -1;
            const double d3_inward =
                (-2.5 * y[j] + 9.0 * y[j + step] - 12.0 * y[j + 2 * step] +
                 7.0 * y[j + 3 * step] - 1.5 * y[j + 4 * step]) /
                (dx * dx * dx);
            uxx = 2.0 * (y[j + step] - y[j]) / (dx * dx) +
                  2.0 / dx * (nb.bc->at(t) - nb.gamma * y[j]) - (dx / 3.0) * d3_inward;
        } else {
            uxx = (y[j - 1] - 2.0 * y[j] + y[j + 1]) / (dx * dx);
        }
        return a * uxx - q_[j] * y[j];
    }

    /// d(L y)_j / dy_j.
    double diag_coeff(int s, int j) const {
        const double a = spec_.diffusion;
        const double dx = grid_.dx();
        if (j == 0 || j == grid_.nx - 1) {
            const NodeBc& nb = node_bc_[s][j == 0 ? 0 : 1];
            return a * (-2.0 / (dx * dx) - 2.0 * nb.gamma / dx) - q_[j];
        }
        return -2.0 * a / (dx * dx) - q_[j];
    }

    /// d(L y)_j / dy_{j +/- 1}.
    double offdiag_coeff(int j) const {
        const double a = spec_.diffusion;
        const double dx = grid_.dx();
        if (j == 0 || j == grid_.nx - 1) return 2.0 * a / (dx * dx);
        return a / (dx * dx);
    }

    double q_at_node(int j) const { return q_[j]; }

private:
    const SystemSpec& spec_;
    const Grid& grid_;
    std::vector<double> q_;
    std::array<std::array<NodeBc, 2>, 2> node_bc_;  // [species][end]
};

double max_abs(const Fields& f) {
    double m = 0.0;
    for (const auto& v : f)
        for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

Fields cn_step(const Fields& state, double t, double dt, const SystemSpec& spec,
               const Grid& grid, const SolverOptions& opts) {
    const int nx = grid.nx;
    const double t1 = t + dt;
    SpatialOperator op(spec, grid);

    // Explicit half: L u^n + G(u^n) evaluated once.
    std::array<std::vector<double>, 2> explicit_half;
    for (int s = 0; s < 2; ++s) explicit_half[s].resize(nx);
    for (int j = 0; j < nx; ++j) {
        const double x = grid.x(j);
        const SystemSpec::ReactionEval re = spec.reaction(x, t, state[0][j], state[1][j]);
        for (int s = 0; s < 2; ++s)
            explicit_half[s][j] = op.apply(s, state[s].data(), j, t) + re.g[s];
    }

    Fields next = state;
    for (int s = 0; s < 2; ++s) {
        if (op.is_dirichlet(s, 0)) next[s][0] = op.dirichlet_value(s, 0, t1);
        if (op.is_dirichlet(s, nx - 1)) next[s][nx - 1] = op.dirichlet_value(s, nx - 1, t1);
    }

    BlockTridiagonal system;
    system.resize(nx);
    std::vector<std::array<double, 2>> residual(nx);
    const double half = 0.5 * dt;

    for (int iter = 0; iter < opts.max_newton_iters; ++iter) {
        double res_norm = 0.0;
        double sol_norm = 0.0;
        for (int j = 0; j < nx; ++j) {
            const double x = grid.x(j);
            const SystemSpec::ReactionEval re = spec.reaction(x, t1, next[0][j], next[1][j]);
            Block d{};
            std::array<double, 2> lo{0.0, 0.0}, up{0.0, 0.0};
            for (int s = 0; s < 2; ++s) {
                sol_norm = std::max(sol_norm, std::abs(next[s][j]));
                if (op.is_dirichlet(s, j)) {
                    residual[j][s] = next[s][j] - op.dirichlet_value(s, j, t1);
                    d.a[s * 2 + s] = 1.0;
                    continue;
                }
                const double implicit_half = op.apply(s, next[s].data(), j, t1) + re.g[s];
                residual[j][s] =
                    next[s][j] - state[s][j] - half * (implicit_half + explicit_half[s][j]);
                const double own = s == 0 ? re.gu[0] : re.gv[1];
                const double cross = s == 0 ? re.gv[0] : re.gu[1];
                d.a[s * 2 + s] = 1.0 - half * (op.diag_coeff(s, j) + own);
                d.a[s * 2 + (1 - s)] = -half * cross;
                if (j > 0) lo[s] = -half * op.offdiag_coeff(j);
                if (j < nx - 1) up[s] = -half * op.offdiag_coeff(j);
            }
            system.diag[j] = d;
            system.lower[j] = lo;
            system.upper[j] = up;
            res_norm = std::max({res_norm, std::abs(residual[j][0]), std::abs(residual[j][1])});
        }
        if (!std::isfinite(res_norm) || sol_norm > opts.blowup_cap)
            throw BlowUp("field magnitude exceeded cap " + std::to_string(opts.blowup_cap) +
                         " at t = " + std::to_string(t1));
        if (res_norm <= opts.newton_tol * (1.0 + sol_norm)) return next;

        system.solve(residual);
        for (int j = 0; j < nx; ++j) {
            next[0][j] -= residual[j][0];
            next[1][j] -= residual[j][1];
        }
    }
    throw NewtonDivergence("Newton residual not below tolerance within " +
                           std::to_string(opts.max_newton_iters) + " iterations at t = " +
                           std::to_string(t1));
}

Trajectory solve_single_grid(const SystemSpec& spec, const Grid& grid,
                             const SolverOptions& opts) {
    Trajectory traj(grid);
    Fields state;
    for (int s = 0; s < 2; ++s) {
        state[s].resize(grid.nx);
        for (int j = 0; j < grid.nx; ++j)
            state[s][j] = spec.initial[s] ? spec.initial[s](grid.x(j)) : 0.0;
        std::memcpy(traj.level(s, 0).data(), state[s].data(), sizeof(double) * grid.nx);
    }
    if (max_abs(state) > opts.blowup_cap) throw BlowUp("initial data exceeds blow-up cap");

    const double dt = grid.dt();
    for (int k = 1; k < grid.nt; ++k) {
        state = cn_step(state, grid.t(k - 1), dt, spec, grid, opts);
        for (int s = 0; s < 2; ++s)
            std::memcpy(traj.level(s, k).data(), state[s].data(), sizeof(double) * grid.nx);
    }
    return traj;
}

Trajectory solve_forward(const SystemSpec& spec, const Grid& grid, const SolverOptions& opts) {
    const Trajectory coarse = solve_single_grid(spec, grid, opts);
    const Trajectory fine = solve_single_grid(spec, grid.refined(), opts);
    Trajectory out(grid);
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < grid.nt; ++k)
            for (int j = 0; j < grid.nx; ++j)
                out.at(s, k, j) =
                    (4.0 * fine.at(s, 2 * k, 2 * j) - coarse.at(s, k, j)) / 3.0;
    return out;
}

Fields time_derivative_at_T(const Trajectory& traj) {
    const Grid& g = traj.grid;
    if (g.nt < 5) throw GridTooCoarse("time_derivative_at_T needs nt >= 5");
    const double dt = g.dt();
    const int N = g.nt - 1;
    Fields out;
    for (int s = 0; s < 2; ++s) {
        out[s].resize(g.nx);
        for (int j = 0; j < g.nx; ++j) {
            out[s][j] = (11.0 * traj.at(s, N, j) - 18.0 * traj.at(s, N - 1, j) +
                         9.0 * traj.at(s, N - 2, j) - 2.0 * traj.at(s, N - 3, j)) /
                        (6.0 * dt);
        }
    }
    return out;
}

namespace {

Fields one_sided_boundary(const Trajectory& traj, Endpoint endpoint, const SystemSpec& spec,
                          bool second_derivative) {
    const Grid& g = traj.grid;
    if (g.nx < 6) throw GridTooCoarse("boundary stencils need nx >= 6");
    const double dx = g.dx();
    const bool left = endpoint == Endpoint::Left;
    const int j0 = left ? 0 : g.nx - 1;
    const int step = left ? 1 : -1;
    const double x0 = g.x(j0);
    const double q0 = spec.q_at(x0);
    const double a = spec.diffusion;

    Fields out;
    for (int s = 0; s < 2; ++s) {
        out[s].resize(g.nt);
        for (int k = 0; k < g.nt; ++k) {
            double y[5];
            for (int i = 0; i < 5; ++i) y[i] = traj.at(s, k, j0 + i * step);
            if (second_derivative) {
                const double uxx =
                    (35.0 * y[0] - 104.0 * y[1] + 114.0 * y[2] - 56.0 * y[3] + 11.0 * y[4]) /
                    (12.0 * dx * dx);
                out[s][k] = a * uxx - q0 * y[0];
            } else {
                // First difference along the inward direction; the outward
                // flux is its negative at either end.
                const double ux_inward =
                    (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) /
                    (12.0 * dx);
                out[s][k] = -a * ux_inward;
            }
        }
    }
    return out;
}

}  // namespace

Fields laplacian_at_boundary(const Trajectory& traj, Endpoint endpoint,
                             const SystemSpec& spec) {
    return one_sided_boundary(traj, endpoint, spec, true);
}

Fields boundary_flux(const Trajectory& traj, Endpoint endpoint, const SystemSpec& spec) {
    return one_sided_boundary(traj, endpoint, spec, false);
}

}  // namespace rdinv
