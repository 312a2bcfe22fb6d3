#include "rdinv/presets.hpp"

#include <cmath>
#include <numbers>

#include "rdinv/errors.hpp"

namespace rdinv {

namespace {

using std::numbers::pi;

BoundarySpec dirichlet_neumann_bc(double flux_u, double flux_v) {
    BoundarySpec bc;
    for (int s = 0; s < 2; ++s) {
        bc.at(s, Endpoint::Left) = BoundaryCondition::dirichlet();
        const double c = s == 0 ? flux_u : flux_v;
        bc.at(s, Endpoint::Right) =
            c == 0.0 ? BoundaryCondition::neumann()
                     : BoundaryCondition::neumann([c](double t) { return c * t; });
    }
    return bc;
}

Coupling coupling_by_name(const std::string& name) {
    if (name == "uv") return Coupling::product();
    if (name == "u2v") return Coupling::square_product();
    throw ConfigError("unknown coupling preset '" + name + "' (use \"uv\" or \"u2v\")");
}

// Shared driving terms of the reconstruction experiments.
Source source_u_driving() {
    return Source::of_xt([](double x, double t) { return 10.0 * std::sin(0.5 * pi * x) * t; });
}
Source source_v_driving() {
    return Source::of_xt([](double x, double t) { return 12.0 * (2.0 * x - x * x) * t; });
}

double f1_target(double u) { return 2.0 * u * (1.0 - u) * (u - 0.9); }
double f1_target_d(double u) { return -6.0 * u * u + 7.6 * u - 1.8; }

double f2_target(double v) {
    return std::max(2.0 * std::exp(-5.0 * (v - 1.0) * (v - 1.0)) - 0.1 * v * v, -2.0);
}
double f2_target_d(double v) {
    const double inner = 2.0 * std::exp(-5.0 * (v - 1.0) * (v - 1.0)) - 0.1 * v * v;
    if (inner <= -2.0) return 0.0;
    return -20.0 * (v - 1.0) * std::exp(-5.0 * (v - 1.0) * (v - 1.0)) - 0.2 * v;
}

double phi1_target(double w) {
    return std::atan(w) + 2.0 * w * std::exp(-(w - 1.0) * (w - 1.0));
}
double phi1_target_d(double w) {
    const double e = std::exp(-(w - 1.0) * (w - 1.0));
    return 1.0 / (1.0 + w * w) + (2.0 - 4.0 * w * (w - 1.0)) * e;
}

double phi2_target(double w) {
    if (w >= 3.0) return 2.7;
    return 0.1 * (27.0 - (3.0 - w) * (3.0 - w) * (3.0 + 2.0 * w));
}
double phi2_target_d(double w) {
    if (w >= 3.0) return 0.0;
    return 0.6 * w * (3.0 - w);
}

}  // namespace

double eigen_preset_lambda() { return 0.25 * pi * pi; }

double eigen_preset_solution(double x, double t, double c) {
    return std::exp(-(eigen_preset_lambda() - c) * t) * std::sqrt(2.0) *
           std::sin(0.5 * pi * x);
}

ExperimentPreset make_preset(const std::string& name, const PresetParams& p) {
    ExperimentPreset preset;
    preset.name = name;
    preset.grid = Grid(200, 300, 1.0, p.horizon);

    if (name == "example1-eigen") {
        SystemSpec spec;
        spec.bc = dirichlet_neumann_bc(0.0, 0.0);
        const double c = p.eigen_c;
        auto phi1 = [](double x) { return std::sqrt(2.0) * std::sin(0.5 * pi * x); };
        spec.initial = {phi1, phi1};
        FPair slot;
        slot.beta = 0.0;  // decoupled
        slot.f1 = ScalarFn::analytic([c](double u) { return c * u; },
                                     [c](double) { return c; });
        slot.f2 = slot.f1;
        spec.unknown = slot;
        preset.spec = std::move(spec);
        preset.truth = {[c](double u) { return c * u; }, [c](double v) { return c * v; }};
        preset.default_mode = MeasurementKind::FinalTime;
        return preset;
    }

    if (name == "competing-species") {
        SystemSpec spec;
        spec.bc = dirichlet_neumann_bc(p.flux_u, p.flux_v);
        spec.initial = {[](double x) { return x * (1.0 - x) * (1.0 - x); },
                        [](double x) { return std::sin(0.5 * pi * x); }};
        spec.sources = {source_u_driving(), source_v_driving()};
        spec.coupling = coupling_by_name(p.coupling);
        FPair slot;
        slot.beta = p.beta;
        slot.f1 = ScalarFn::analytic([](double u) { return f1_target(u); },
                                     [](double u) { return f1_target_d(u); });
        slot.f2 = ScalarFn::analytic([](double v) { return f2_target(v); },
                                     [](double v) { return f2_target_d(v); });
        spec.unknown = slot;
        preset.spec = std::move(spec);
        preset.truth = {f1_target, f2_target};
        return preset;
    }

    if (name == "interaction-phi") {
        SystemSpec spec;
        spec.bc = dirichlet_neumann_bc(p.flux_u, p.flux_v);
        spec.initial = {[](double x) { return x * (1.0 - x) * (1.0 - x); },
                        [](double x) { return std::sin(0.5 * pi * x); }};
        spec.sources = {source_u_driving(), source_v_driving()};
        spec.coupling = coupling_by_name(p.coupling);
        PhiPair slot;
        slot.beta_u = p.beta_u;
        slot.beta_v = p.beta_v;
        slot.f1 = ScalarFn::analytic([](double u) { return u * (1.0 - u); },
                                     [](double u) { return 1.0 - 2.0 * u; });
        slot.f2 = ScalarFn::analytic([](double v) { return v * (2.0 - v); },
                                     [](double v) { return 2.0 - 2.0 * v; });
        slot.phi1 = ScalarFn::analytic([](double w) { return phi1_target(w); },
                                       [](double w) { return phi1_target_d(w); });
        slot.phi2 = ScalarFn::analytic([](double w) { return phi2_target(w); },
                                       [](double w) { return phi2_target_d(w); });
        spec.unknown = slot;
        preset.spec = std::move(spec);
        preset.truth = {phi1_target, phi2_target};
        return preset;
    }

    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace rdinv
