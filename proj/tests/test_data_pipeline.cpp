#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rdinv/errors.hpp"
#include "rdinv/forward_solver.hpp"
#include "rdinv/presets.hpp"
#include "rdinv/smoothing.hpp"

using namespace rdinv;
using std::numbers::pi;

namespace {

const double kC = 1.0;

SystemSpec eigen_spec() {
    PresetParams p;
    p.eigen_c = kC;
    return make_preset("example1-eigen", p).spec;
}

Trajectory eigen_traj() {
    static Trajectory traj = solve_forward(eigen_spec(), Grid(200, 300, 1.0, 1.0));
    return traj;
}

double l2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / a.size());
}

}  // namespace

TEST_CASE("noise-free sampling returns exact trajectory values") {
    Trajectory traj = eigen_traj();
    SUBCASE("final time, paper default S") {
        Measurement m = sample_measurement(traj, MeasurementKind::FinalTime, 20, 0.0, 7);
        CHECK(m.count() == 20);
        for (int i = 0; i < m.count(); ++i) {
            const int j = static_cast<int>(std::lround(m.abscissae[i] / traj.grid.dx()));
            CHECK(m.values[0][i] == traj.at(0, traj.grid.nt - 1, j));
            CHECK(m.values[1][i] == traj.at(1, traj.grid.nt - 1, j));
        }
        CHECK(m.abscissae.front() == 0.0);
        CHECK(m.abscissae.back() == doctest::Approx(1.0));
    }
    SUBCASE("time trace at the right endpoint") {
        Measurement m = sample_measurement(traj, MeasurementKind::TimeTrace, 25, 0.0, 7);
        CHECK(m.count() == 25);
        for (int i = 0; i < m.count(); ++i) {
            const int k = static_cast<int>(std::lround(m.abscissae[i] / traj.grid.dt()));
            CHECK(m.values[0][i] == traj.at(0, k, traj.grid.nx - 1));
        }
    }
    SUBCASE("S above the resolution is rejected") {
        CHECK_THROWS(sample_measurement(traj, MeasurementKind::FinalTime, 300, 0.0, 7));
        CHECK_THROWS(sample_measurement(traj, MeasurementKind::FinalTime, 3, 0.0, 7));
    }
}

TEST_CASE("noise is mean zero, amplitude-scaled, and seed-deterministic") {
    Trajectory traj = eigen_traj();
    const double delta = 0.01;
    double amp = 0.0;
    {
        Measurement clean = sample_measurement(traj, MeasurementKind::TimeTrace, 250, 0.0, 0);
        for (double y : clean.values[0]) amp = std::max(amp, std::abs(y));
        amp *= delta;
    }
    double sum = 0.0;
    int n = 0;
    double maxdev = 0.0;
    Measurement clean = sample_measurement(traj, MeasurementKind::TimeTrace, 250, 0.0, 0);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Measurement noisy =
            sample_measurement(traj, MeasurementKind::TimeTrace, 250, delta, seed);
        for (int i = 0; i < noisy.count(); ++i) {
            const double dev = noisy.values[0][i] - clean.values[0][i];
            sum += dev;
            maxdev = std::max(maxdev, std::abs(dev));
            ++n;
        }
    }
    const double mean = sum / n;
    const double stderr_mean = amp / std::sqrt(3.0 * n);
    CHECK(std::abs(mean) <= 3.0 * stderr_mean);
    CHECK(maxdev <= amp * (1.0 + 1e-12));

    Measurement a = sample_measurement(traj, MeasurementKind::TimeTrace, 25, delta, 11);
    Measurement b = sample_measurement(traj, MeasurementKind::TimeTrace, 25, delta, 11);
    Measurement c = sample_measurement(traj, MeasurementKind::TimeTrace, 25, delta, 12);
    CHECK(a.values[0] == b.values[0]);
    CHECK(a.values[1] == b.values[1]);
    CHECK(a.values[0] != c.values[0]);
}

TEST_CASE("spatial smoothing reproduces an eigenfunction exactly") {
    const Grid g(200, 300, 1.0, 1.0);
    const SystemSpec spec = eigen_spec();
    const double lambda = eigen_preset_lambda();

    Measurement m;
    m.kind = MeasurementKind::FinalTime;
    const int S = 20;
    m.abscissae.resize(S);
    for (int i = 0; i < S; ++i) {
        m.abscissae[i] = static_cast<double>(i) / (S - 1);
        const double phi = std::sqrt(2.0) * std::sin(0.5 * pi * m.abscissae[i]);
        m.values[0].push_back(phi);
        m.values[1].push_back(phi);
    }
    SmoothedData d = smooth_spatial(m, 10, 0.0, spec, g);
    for (int j = 0; j < g.nx; ++j) {
        const double x = g.x(j);
        const double phi = std::sqrt(2.0) * std::sin(0.5 * pi * x);
        CHECK(std::abs(d.values[0][j] - phi) <= 1e-8);
        // a g'' - q g = -lambda_1 phi for the pure first mode
        CHECK(std::abs(d.second[0][j] + lambda * phi) <= 1e-6);
    }
}

TEST_CASE("noise-free spatial smoothing tracks the trajectory to 1e-4") {
    PresetParams p;
    p.beta = -1.0;
    ExperimentPreset preset = make_preset("competing-species", p);
    Trajectory traj = solve_forward(preset.spec, preset.grid);
    Measurement m = sample_measurement(traj, MeasurementKind::FinalTime, 20, 0.0, 3);
    SmoothedData d = smooth_spatial(m, -1, -1.0, preset.spec, preset.grid);
    double err = 0.0;
    for (int j = 0; j < preset.grid.nx; ++j) {
        err = std::max(err, std::abs(d.values[0][j] - traj.at(0, preset.grid.nt - 1, j)));
        err = std::max(err, std::abs(d.values[1][j] - traj.at(1, preset.grid.nt - 1, j)));
    }
    CHECK(err <= 1e-4);
}

TEST_CASE("spectral filter beats raw differencing on noisy data") {
    Trajectory traj = eigen_traj();
    const Grid& g = traj.grid;
    const SystemSpec spec = eigen_spec();
    const double lambda = eigen_preset_lambda();
    Measurement m = sample_measurement(traj, MeasurementKind::FinalTime, 20, 0.01, 5);
    SmoothedData filtered = smooth_spatial(m, -1, -1.0, spec, g);
    SmoothedData raw = interpolate_raw(m, g);
    // True elliptic term of the closed form: -lambda * u(x,T).
    double err_f = 0.0, err_r = 0.0;
    for (int j = 0; j < g.nx; ++j) {
        const double truth = -lambda * eigen_preset_solution(g.x(j), 1.0, kC);
        err_f += std::pow(filtered.second[0][j] - truth, 2);
        err_r += std::pow(raw.second[0][j] - truth, 2);
    }
    CHECK(err_f < err_r);
}

TEST_CASE("square spectral system interpolates the samples") {
    Trajectory traj = eigen_traj();
    const SystemSpec spec = eigen_spec();
    Measurement m = sample_measurement(traj, MeasurementKind::FinalTime, 20, 0.0, 5);
    SmoothedData d = smooth_spatial(m, 20, 0.0, spec, traj.grid);
    for (int i = 0; i < m.count(); ++i) {
        const int j = static_cast<int>(std::lround(m.abscissae[i] / traj.grid.dx()));
        CHECK(std::abs(d.values[0][j] - m.values[0][i]) <= 1e-8);
    }
    CHECK_THROWS_AS(smooth_spatial(m, 25, 0.0, spec, traj.grid), IllConditioned);
}

TEST_CASE("increasing the spectral penalty never raises the smoothness seminorm") {
    Trajectory traj = eigen_traj();
    const SystemSpec spec = eigen_spec();
    Measurement m = sample_measurement(traj, MeasurementKind::FinalTime, 20, 0.01, 9);
    double prev = -1.0;
    for (double mu : {1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
        SmoothedData d = smooth_spatial(m, 20, mu, spec, traj.grid);
        // Trapezoid integral of (L g)^2 equals the coefficient seminorm by
        // orthonormality.
        double semi = 0.0;
        const Grid& g = traj.grid;
        for (int j = 0; j < g.nx; ++j) {
            const double w = (j == 0 || j == g.nx - 1) ? 0.5 : 1.0;
            semi += w * d.second[0][j] * d.second[0][j] * g.dx();
        }
        if (prev >= 0.0) CHECK(semi <= prev * (1.0 + 1e-9));
        prev = semi;
    }
}

TEST_CASE("temporal smoothing") {
    const Grid g(200, 300, 1.0, 1.0);
    SUBCASE("linear trace with zero anchor recovers the slope") {
        Measurement m;
        m.kind = MeasurementKind::TimeTrace;
        const double k = 1.7;
        for (int i = 0; i < 25; ++i) {
            m.abscissae.push_back(static_cast<double>(i) / 24.0);
            m.values[0].push_back(k * m.abscissae.back());
            m.values[1].push_back(-0.5 * k * m.abscissae.back());
        }
        SmoothedData d = smooth_temporal(m, 1e-12, {0.0, 0.0}, g);
        for (int j = 0; j < g.nt; ++j) {
            CHECK(std::abs(d.values[0][j] - k * g.t(j)) <= 1e-6);
            CHECK(std::abs(d.deriv[0][j] - k) <= 1e-6);
            CHECK(std::abs(d.deriv[1][j] + 0.5 * k) <= 1e-6);
        }
    }
    SUBCASE("zero penalty interpolates the samples") {
        Trajectory traj = eigen_traj();
        Measurement m = sample_measurement(traj, MeasurementKind::TimeTrace, 25, 0.0, 2);
        const double anchor = std::sqrt(2.0);  // u0 at the right endpoint
        SmoothedData d = smooth_temporal(m, 0.0, {anchor, anchor}, g);
        for (int i = 0; i < m.count(); ++i) {
            const int j = static_cast<int>(std::lround(m.abscissae[i] / g.dt()));
            CHECK(std::abs(d.values[0][j] - m.values[0][i]) <= 1e-6);
        }
        CHECK(d.values[0][0] == doctest::Approx(anchor).epsilon(1e-12));
    }
    SUBCASE("smoothed derivative beats raw differencing under noise") {
        Trajectory traj = eigen_traj();
        Measurement m = sample_measurement(traj, MeasurementKind::TimeTrace, 25, 0.01, 5);
        const double anchor = std::sqrt(2.0);
        SmoothedData sm = smooth_temporal(m, -1.0, {anchor, anchor}, g);
        SmoothedData raw = interpolate_raw(m, g);
        const double rate = eigen_preset_lambda() - kC;
        std::vector<double> truth(g.nt);
        for (int j = 0; j < g.nt; ++j)
            truth[j] = -rate * eigen_preset_solution(1.0, g.t(j), kC);
        CHECK(l2(sm.deriv[0], truth) < l2(raw.deriv[0], truth));
    }
}

TEST_CASE("range estimation") {
    const Grid g(200, 300, 1.0, 1.0);
    SUBCASE("constant data is degenerate") {
        SmoothedData d;
        d.abscissae.assign(50, 0.0);
        d.values[0].assign(50, 1.5);
        d.values[1].assign(50, 1.5);
        CHECK_THROWS_AS(estimate_range(d, 0), DegenerateRange);
    }
    SUBCASE("monotone data spans its extrema") {
        SmoothedData d;
        for (int i = 0; i < 51; ++i) {
            d.abscissae.push_back(i / 50.0);
            d.values[0].push_back(2.0 * i / 50.0);
            d.values[1].push_back(1.0 - i / 100.0);
        }
        RangeInterval J = estimate_range(d, 0);
        CHECK(J.lo == doctest::Approx(0.0));
        CHECK(J.hi == doctest::Approx(2.0));
    }
    SUBCASE("eigen final-time range matches the closed form") {
        Trajectory traj = eigen_traj();
        Measurement m = sample_measurement(traj, MeasurementKind::FinalTime, 20, 0.0, 2);
        SmoothedData d = smooth_spatial(m, -1, -1.0, eigen_spec(), g);
        RangeInterval J = estimate_range(d, 0);
        const double decay = std::exp(-(eigen_preset_lambda() - kC));
        CHECK(std::abs(J.lo - 0.0) <= 1e-4);
        CHECK(std::abs(J.hi - std::sqrt(2.0) * decay) <= 1e-4);
        // The full trajectory range is wider: the range condition fails for
        // final-time data of a decaying solution.
        double umax = 0.0;
        for (double y : traj.values[0]) umax = std::max(umax, y);
        CHECK(umax > J.hi * 1.5);
    }
}

TEST_CASE("invertibility margins") {
    SUBCASE("identity slots use the per-species derivative floor") {
        SmoothedData d;
        const Grid g(200, 100, 1.0, 1.0);
        for (int j = 0; j < 100; ++j) {
            const double t = j / 99.0;
            d.abscissae.push_back(t);
            d.values[0].push_back(t);
            d.values[1].push_back(t * t);
        }
        d.deriv[0].assign(100, 0.0);
        d.deriv[1].assign(100, 0.0);
        for (int j = 0; j < 100; ++j) {
            d.deriv[0][j] = 0.3 + 0.1 * (j / 99.0);
            d.deriv[1][j] = 2.0 * (j / 99.0) - 1.0;  // crosses zero
        }
        auto m = invertibility_margin(d);
        CHECK(m[0] == doctest::Approx(0.3));
        CHECK(m[1] <= 0.02);
    }
    SUBCASE("composite margin on simulated interaction data") {
        PresetParams p;
        p.beta_u = 1.0;
        p.beta_v = 1.0;
        ExperimentPreset preset = make_preset("interaction-phi", p);
        Trajectory traj = solve_forward(preset.spec, preset.grid);
        Measurement m = sample_measurement(traj, MeasurementKind::TimeTrace, 25, 0.0, 2);
        SmoothedData d = smooth_temporal(
            m, -1.0, {0.0, preset.spec.initial[1](1.0)}, preset.grid);
        auto margins = invertibility_margin(d, &preset.spec.coupling);
        CHECK(margins[0] > 0.0);
        CHECK(margins[0] == margins[1]);
    }
}
