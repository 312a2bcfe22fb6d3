#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "rdinv/eigenbasis.hpp"
#include "rdinv/errors.hpp"
#include "rdinv/forward_solver.hpp"
#include "rdinv/presets.hpp"

using namespace rdinv;
using std::numbers::pi;

namespace {

ScalarFn linear_fn(double c) {
    return ScalarFn::analytic([c](double u) { return c * u; }, [c](double) { return c; });
}

SystemSpec eigen_spec(double c) {
    PresetParams p;
    p.eigen_c = c;
    return make_preset("example1-eigen", p).spec;
}

// Manufactured pair with cross coupling:
//   u*(x,t) = exp(-t) sin(pi x / 2),  v*(x,t) = exp(-2t) (3x^2 - 2x^3),
// with f1(u) = -u^2, f2(v) = -v^2, beta = 1, w = u v, and sources chosen so
// the PDE holds exactly. Both satisfy Dirichlet(0)-left / Neumann(0)-right.
double u_star(double x, double t) { return std::exp(-t) * std::sin(0.5 * pi * x); }
double v_star(double x, double t) {
    return std::exp(-2.0 * t) * (3.0 * x * x - 2.0 * x * x * x);
}

SystemSpec manufactured_spec() {
    SystemSpec spec;
    for (int s = 0; s < 2; ++s) {
        spec.bc.at(s, Endpoint::Left) = BoundaryCondition::dirichlet();
        spec.bc.at(s, Endpoint::Right) = BoundaryCondition::neumann();
    }
    spec.initial = {[](double x) { return u_star(x, 0.0); },
                    [](double x) { return v_star(x, 0.0); }};
    FPair slot;
    slot.beta = 1.0;
    slot.f1 = ScalarFn::analytic([](double u) { return -u * u; },
                                 [](double u) { return -2.0 * u; });
    slot.f2 = ScalarFn::analytic([](double v) { return -v * v; },
                                 [](double v) { return -2.0 * v; });
    spec.unknown = slot;
    spec.sources[0] = Source::of_xt([](double x, double t) {
        const double u = u_star(x, t);
        return -u + 0.25 * pi * pi * u + u * u - u * v_star(x, t);
    });
    spec.sources[1] = Source::of_xt([](double x, double t) {
        const double v = v_star(x, t);
        return -2.0 * v - std::exp(-2.0 * t) * (6.0 - 12.0 * x) + v * v - u_star(x, t) * v;
    });
    return spec;
}

double max_err_at_T(const Trajectory& traj, double (*exact_u)(double, double),
                    double (*exact_v)(double, double)) {
    const Grid& g = traj.grid;
    double err = 0.0;
    for (int j = 0; j < g.nx; ++j) {
        err = std::max(err, std::abs(traj.at(0, g.nt - 1, j) - exact_u(g.x(j), g.horizon)));
        err = std::max(err, std::abs(traj.at(1, g.nt - 1, j) - exact_v(g.x(j), g.horizon)));
    }
    return err;
}

}  // namespace

TEST_CASE("zero data stays exactly zero") {
    SystemSpec spec;
    for (int s = 0; s < 2; ++s) {
        spec.bc.at(s, Endpoint::Left) = BoundaryCondition::dirichlet();
        spec.bc.at(s, Endpoint::Right) = BoundaryCondition::neumann();
    }
    Grid g(33, 17, 1.0, 1.0);
    Fields state = {std::vector<double>(33, 0.0), std::vector<double>(33, 0.0)};
    Fields next = cn_step(state, 0.0, g.dt(), spec, g);
    for (int s = 0; s < 2; ++s)
        for (double y : next[s]) CHECK(y == 0.0);
}

TEST_CASE("one step tracks the eigen decay to third order in dt") {
    const double c = 1.0;
    SystemSpec spec = eigen_spec(c);
    const double lambda = eigen_preset_lambda();
    const int nx = 2001;

    double prev_err = 0.0;
    for (int level = 0; level < 3; ++level) {
        const double dt = 0.01 / (1 << level);
        Grid g(nx, 3, 1.0, 1.0);
        Fields state;
        for (int s = 0; s < 2; ++s) {
            state[s].resize(nx);
            for (int j = 0; j < nx; ++j) state[s][j] = eigen_preset_solution(g.x(j), 0.0, c);
        }
        Fields next = cn_step(state, 0.0, dt, spec, g);
        double err = 0.0;
        const double decay = std::exp(-(lambda - c) * dt);
        for (int j = 0; j < nx; ++j)
            err = std::max(err, std::abs(next[0][j] - decay * state[0][j]));
        if (level > 0) {
            const double order = std::log2(prev_err / err);
            CHECK(order >= 2.7);  // local error O(dt^3)
        }
        prev_err = err;
    }
}

TEST_CASE("one manufactured step has O(dt^3) local error") {
    SystemSpec spec = manufactured_spec();
    const int nx = 1001;
    double prev_err = 0.0;
    for (int level = 0; level < 3; ++level) {
        const double dt = 0.02 / (1 << level);
        Grid g(nx, 3, 1.0, 1.0);
        Fields state;
        for (int s = 0; s < 2; ++s) {
            state[s].resize(nx);
            for (int j = 0; j < nx; ++j)
                state[s][j] = s == 0 ? u_star(g.x(j), 0.0) : v_star(g.x(j), 0.0);
        }
        Fields next = cn_step(state, 0.0, dt, spec, g);
        double err = 0.0;
        for (int j = 0; j < nx; ++j) {
            err = std::max(err, std::abs(next[0][j] - u_star(g.x(j), dt)));
            err = std::max(err, std::abs(next[1][j] - v_star(g.x(j), dt)));
        }
        if (level > 0) CHECK(std::log2(prev_err / err) >= 2.5);
        prev_err = err;
    }
}

TEST_CASE("decoupled eigen pair matches the closed form to 1e-4 at 200x300") {
    const double c = 1.0;
    Trajectory traj = solve_forward(eigen_spec(c), Grid(200, 300, 1.0, 1.0));
    double err = 0.0;
    const Grid& g = traj.grid;
    for (int k = 0; k < g.nt; ++k)
        for (int j = 0; j < g.nx; ++j) {
            const double exact = eigen_preset_solution(g.x(j), g.t(k), c);
            err = std::max(err, std::abs(traj.at(0, k, j) - exact));
            err = std::max(err, std::abs(traj.at(1, k, j) - exact));
        }
    CHECK(err <= 1e-4);
}

TEST_CASE("manufactured refinement study shows order >= 3.5") {
    SystemSpec spec = manufactured_spec();
    double errs[3];
    const int nx0 = 33, nt0 = 49;
    for (int level = 0; level < 3; ++level) {
        Grid g(((nx0 - 1) << level) + 1, ((nt0 - 1) << level) + 1, 1.0, 1.0);
        errs[level] = max_err_at_T(solve_forward(spec, g), u_star, v_star);
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CAPTURE(errs[0]);
    CAPTURE(errs[1]);
    CAPTURE(errs[2]);
    CHECK(order1 >= 3.5);
    CHECK(order2 >= 3.5);
    CHECK(order2 <= 4.5);
}

TEST_CASE("Robin endpoints converge against a manufactured solution") {
    // Same u*, v* but with a Robin condition at the right end of species u:
    // u_x(1,t) + 2 u(1,t) = 2 exp(-t).
    SystemSpec spec = manufactured_spec();
    spec.bc.at(0, Endpoint::Right) =
        BoundaryCondition::robin(2.0, [](double t) { return 2.0 * std::exp(-t); });
    double errs[2];
    for (int level = 0; level < 2; ++level) {
        Grid g(((65 - 1) << level) + 1, ((97 - 1) << level) + 1, 1.0, 1.0);
        errs[level] = max_err_at_T(solve_single_grid(spec, g), u_star, v_star);
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.7);  // plain CN is second order
    CHECK(errs[1] <= 5e-4);
}

TEST_CASE("homogeneous Neumann with no reaction conserves mass") {
    SystemSpec spec;
    for (int s = 0; s < 2; ++s) {
        spec.bc.at(s, Endpoint::Left) = BoundaryCondition::neumann();
        spec.bc.at(s, Endpoint::Right) = BoundaryCondition::neumann();
    }
    spec.initial = {
        [](double x) { return 1.0 + std::cos(pi * x) + 0.3 * std::cos(2 * pi * x); },
        [](double x) { return 2.0 + 0.5 * std::cos(2.0 * pi * x); }};
    Grid g(151, 201, 1.0, 1.0);
    Trajectory traj = solve_forward(spec, g);
    for (int s = 0; s < 2; ++s) {
        auto mass = [&](int k) {
            double m = 0.5 * (traj.at(s, k, 0) + traj.at(s, k, g.nx - 1));
            for (int j = 1; j < g.nx - 1; ++j) m += traj.at(s, k, j);
            return m * g.dx();
        };
        const double m0 = mass(0);
        for (int k = 1; k < g.nt; ++k)
            CHECK(std::abs(mass(k) - m0) <= 1e-8 * std::abs(m0));
    }
}

TEST_CASE("decreasing reaction keeps the max-norm non-increasing") {
    SystemSpec spec;
    for (int s = 0; s < 2; ++s) {
        spec.bc.at(s, Endpoint::Left) = BoundaryCondition::neumann();
        spec.bc.at(s, Endpoint::Right) = BoundaryCondition::neumann();
    }
    spec.initial = {[](double x) { return 1.0 + 0.5 * std::cos(pi * x); },
                    [](double x) { return 0.8 + 0.4 * std::cos(2.0 * pi * x); }};
    FPair slot;
    slot.f1 = linear_fn(-1.0);
    slot.f2 = linear_fn(-1.0);
    spec.unknown = slot;
    Grid g(101, 151, 1.0, 1.0);
    Trajectory traj = solve_forward(spec, g);
    for (int s = 0; s < 2; ++s) {
        double prev = 1e300;
        for (int k = 0; k < g.nt; ++k) {
            double m = 0.0;
            for (int j = 0; j < g.nx; ++j) m = std::max(m, std::abs(traj.at(s, k, j)));
            if (k > 0) CHECK(m <= prev * (1.0 + 1e-12));
            prev = m;
        }
    }
}

TEST_CASE("identical inputs give bit-identical trajectories") {
    SystemSpec spec = manufactured_spec();
    Grid g(65, 97, 1.0, 1.0);
    Trajectory a = solve_forward(spec, g);
    Trajectory b = solve_forward(spec, g);
    for (int s = 0; s < 2; ++s)
        CHECK(std::memcmp(a.values[s].data(), b.values[s].data(),
                          a.values[s].size() * sizeof(double)) == 0);
}

TEST_CASE("species swap is bit-exact") {
    SystemSpec spec = manufactured_spec();
    SystemSpec swapped = spec;
    std::swap(swapped.initial[0], swapped.initial[1]);
    std::swap(swapped.sources[0], swapped.sources[1]);
    std::swap(swapped.bc.conditions[0], swapped.bc.conditions[1]);
    {
        FPair slot = std::get<FPair>(spec.unknown);
        std::swap(slot.f1, slot.f2);
        swapped.unknown = slot;  // w = u v is symmetric
    }
    Grid g(65, 97, 1.0, 1.0);
    Trajectory a = solve_forward(spec, g);
    Trajectory b = solve_forward(swapped, g);
    CHECK(std::memcmp(a.values[0].data(), b.values[1].data(),
                      a.values[0].size() * sizeof(double)) == 0);
    CHECK(std::memcmp(a.values[1].data(), b.values[0].data(),
                      a.values[1].size() * sizeof(double)) == 0);
}

TEST_CASE("blow-up is reported, not stored") {
    SystemSpec spec;
    for (int s = 0; s < 2; ++s) {
        spec.bc.at(s, Endpoint::Left) = BoundaryCondition::neumann();
        spec.bc.at(s, Endpoint::Right) = BoundaryCondition::neumann();
    }
    spec.initial = {[](double) { return 3.0; }, [](double) { return 3.0; }};
    SUBCASE("runaway linear growth crosses the magnitude cap") {
        FPair slot;
        slot.f1 = linear_fn(20.0);
        slot.f2 = linear_fn(20.0);
        spec.unknown = slot;
        CHECK_THROWS_AS(solve_forward(spec, Grid(65, 401, 1.0, 1.0)), BlowUp);
    }
    SUBCASE("finite-time singularity defeats the step solve") {
        FPair slot;
        slot.f1 = ScalarFn::analytic([](double u) { return u * u * u; },
                                     [](double u) { return 3.0 * u * u; });
        slot.f2 = slot.f1;
        spec.unknown = slot;
        // Either the cap or the Newton iteration reports; garbage is never
        // stored in a Trajectory.
        CHECK_THROWS(solve_forward(spec, Grid(65, 801, 1.0, 2.0)));
    }
}

TEST_CASE("time derivative at T") {
    SUBCASE("linear-in-time field is differentiated exactly") {
        Grid g(33, 17, 1.0, 1.0);
        Trajectory traj(g);
        auto shape = [](double x) { return 1.0 + x * x; };
        for (int k = 0; k < g.nt; ++k)
            for (int j = 0; j < g.nx; ++j) {
                traj.at(0, k, j) = g.t(k) * shape(g.x(j));
                traj.at(1, k, j) = 2.0 * g.t(k) * shape(g.x(j));
            }
        Fields d = time_derivative_at_T(traj);
        for (int j = 0; j < g.nx; ++j) {
            CHECK(d[0][j] == doctest::Approx(shape(g.x(j))).epsilon(1e-12));
            CHECK(d[1][j] == doctest::Approx(2.0 * shape(g.x(j))).epsilon(1e-12));
        }
    }
    SUBCASE("eigen trajectory differentiates to the analytic rate") {
        const double c = 1.0;
        Trajectory traj = solve_forward(eigen_spec(c), Grid(200, 300, 1.0, 1.0));
        Fields d = time_derivative_at_T(traj);
        const double rate = eigen_preset_lambda() - c;
        for (int j = 0; j < traj.grid.nx; ++j) {
            const double exact = -rate * eigen_preset_solution(traj.grid.x(j), 1.0, c);
            CHECK(std::abs(d[0][j] - exact) <= 1e-4);
        }
    }
    SUBCASE("constant trajectory has zero derivative") {
        Grid g(33, 17, 1.0, 1.0);
        Trajectory traj(g);
        for (auto& v : traj.values) std::fill(v.begin(), v.end(), 4.2);
        Fields d = time_derivative_at_T(traj);
        for (int s = 0; s < 2; ++s)
            for (double y : d[s]) CHECK(y == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
    SUBCASE("too few time levels is an error") {
        Grid g(33, 17, 1.0, 1.0);
        Trajectory traj(g);
        traj.grid.nt = 4;
        CHECK_THROWS_AS(time_derivative_at_T(traj), GridTooCoarse);
    }
}

TEST_CASE("boundary operator trace") {
    SystemSpec spec;
    spec.diffusion = 1.7;
    spec.potential = [](double) { return 0.4; };

    SUBCASE("quadratic field is exact up to roundoff") {
        Grid g(33, 17, 1.0, 1.0);
        Trajectory traj(g);
        for (int k = 0; k < g.nt; ++k)
            for (int j = 0; j < g.nx; ++j) {
                traj.at(0, k, j) = g.x(j) * g.x(j);
                traj.at(1, k, j) = 3.0 * g.x(j) * g.x(j);
            }
        Fields right = laplacian_at_boundary(traj, Endpoint::Right, spec);
        Fields left = laplacian_at_boundary(traj, Endpoint::Left, spec);
        for (int k = 0; k < g.nt; ++k) {
            CHECK(right[0][k] == doctest::Approx(2.0 * 1.7 - 0.4 * 1.0).epsilon(1e-9));
            CHECK(left[0][k] == doctest::Approx(2.0 * 1.7).epsilon(1e-9));
            CHECK(right[1][k] == doctest::Approx(3.0 * (2.0 * 1.7 - 0.4)).epsilon(1e-9));
        }
        Fields flux = boundary_flux(traj, Endpoint::Right, spec);
        CHECK(flux[0][16] == doctest::Approx(1.7 * 2.0).epsilon(1e-9));  // a du/dnu = 2 a x
        Fields flux_left = boundary_flux(traj, Endpoint::Left, spec);
        CHECK(flux_left[0][3] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    }

    SUBCASE("eigen trajectory gives -lambda u at the boundary") {
        const double c = 1.0;
        SystemSpec espec = eigen_spec(c);
        Trajectory traj = solve_forward(espec, Grid(200, 300, 1.0, 1.0));
        Fields lap = laplacian_at_boundary(traj, Endpoint::Right, espec);
        const double lambda = eigen_preset_lambda();
        for (int k = 0; k < traj.grid.nt; ++k) {
            const double u_b = eigen_preset_solution(1.0, traj.grid.t(k), c);
            CHECK(std::abs(lap[0][k] + lambda * u_b) <= 1e-3 * std::abs(lambda * u_b));
        }
    }

    SUBCASE("zero field maps to the zero series") {
        Grid g(33, 17, 1.0, 1.0);
        Trajectory traj(g);
        Fields lap = laplacian_at_boundary(traj, Endpoint::Left, spec);
        for (double y : lap[0]) CHECK(y == 0.0);
    }
}

TEST_CASE("closed-form eigenpairs") {
    Grid g(200, 300, 1.0, 1.0);
    SUBCASE("first eigenvalue of the mixed pattern") {
        EigenPair p = eigenpair(1, g, EigenPattern::DirichletNeumann, 1.0, 0.0);
        CHECK(p.lambda == doctest::Approx(0.25 * pi * pi));
        CHECK(p.lambda == doctest::Approx(2.4674).epsilon(1e-4));
    }
    SUBCASE("orthonormality under trapezoid quadrature") {
        for (EigenPattern pattern :
             {EigenPattern::DirichletNeumann, EigenPattern::NeumannNeumann}) {
            for (int a = 1; a <= 4; ++a)
                for (int b = a; b <= 4; ++b) {
                    EigenPair pa = eigenpair(a, g, pattern, 1.0, 0.0);
                    EigenPair pb = eigenpair(b, g, pattern, 1.0, 0.0);
                    double dot = 0.5 * (pa.phi[0] * pb.phi[0] +
                                        pa.phi[g.nx - 1] * pb.phi[g.nx - 1]);
                    for (int j = 1; j < g.nx - 1; ++j) dot += pa.phi[j] * pb.phi[j];
                    dot *= g.dx();
                    CHECK(dot ==
                          doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-6));
                }
        }
    }
    SUBCASE("discrete stencil residual is small") {
        EigenPair p = eigenpair(2, g, EigenPattern::DirichletNeumann, 1.0, 0.0);
        double res = 0.0;
        for (int j = 1; j < g.nx - 1; ++j) {
            const double lap =
                (p.phi[j - 1] - 2.0 * p.phi[j] + p.phi[j + 1]) / (g.dx() * g.dx());
            res = std::max(res, std::abs(lap + p.lambda * p.phi[j]));
        }
        CHECK(res <= 1e-3 * p.lambda);
    }
    SUBCASE("unsupported patterns are rejected") {
        BoundarySpec bc;
        bc.at(0, Endpoint::Left) = BoundaryCondition::robin(1.0);
        bc.at(0, Endpoint::Right) = BoundaryCondition::neumann();
        CHECK_THROWS_AS(classify_pattern(bc, 0), UnsupportedBC);
        bc.at(0, Endpoint::Left) = BoundaryCondition::dirichlet();
        bc.at(0, Endpoint::Right) = BoundaryCondition::dirichlet();
        CHECK_THROWS_AS(classify_pattern(bc, 0), UnsupportedBC);
        bc.at(0, Endpoint::Right) = BoundaryCondition::neumann();
        CHECK(classify_pattern(bc, 0) == EigenPattern::DirichletNeumann);
    }
}
