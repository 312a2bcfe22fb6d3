#include "rdinv/config.hpp"

#include <fstream>
#include <set>

#include "rdinv/expression.hpp"

namespace rdinv {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("config: '" + path + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw ConfigError("config: unknown key '" + path + "/" + key + "'");
    }
}

double num_at(const json& obj, const std::string& path, const std::string& key,
              double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("config: '" + path + "/" + key + "' must be a number");
    return obj[key].get<double>();
}

int int_at(const json& obj, const std::string& path, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError("config: '" + path + "/" + key + "' must be an integer");
    return obj[key].get<int>();
}

std::string str_at(const json& obj, const std::string& path, const std::string& key,
                   const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string())
        throw ConfigError("config: '" + path + "/" + key + "' must be a string");
    return obj[key].get<std::string>();
}

bool bool_at(const json& obj, const std::string& path, const std::string& key,
             bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean())
        throw ConfigError("config: '" + path + "/" + key + "' must be a boolean");
    return obj[key].get<bool>();
}

void validate_bc_section(const json& bc) {
    require_keys(bc, "system/bc", {"u", "v"});
    for (const char* species : {"u", "v"}) {
        if (!bc.contains(species)) continue;
        const std::string spath = std::string("system/bc/") + species;
        require_keys(bc[species], spath, {"left", "right"});
        for (const char* end : {"left", "right"}) {
            if (!bc[species].contains(end)) continue;
            const json& e = bc[species][end];
            const std::string epath = spath + "/" + end;
            require_keys(e, epath, {"type", "value", "gamma"});
            const std::string type = str_at(e, epath, "type", "");
            if (type != "dirichlet" && type != "neumann" && type != "robin")
                throw ConfigError("config: '" + epath +
                                  "/type' must be dirichlet, neumann or robin");
        }
    }
}

}  // namespace

ScalarFn scalar_fn_from_expr(const std::string& text, char var) {
    expr::NodePtr ast = expr::parse(text);
    expr::NodePtr dast = expr::diff(ast, var);
    auto set_env = [var](double xi) {
        expr::Env env;
        switch (var) {
            case 'u': env.u = xi; break;
            case 'v': env.v = xi; break;
            case 'w': env.w = xi; break;
            case 'x': env.x = xi; break;
            case 't': env.t = xi; break;
        }
        return env;
    };
    return ScalarFn::analytic(
        [ast, set_env](double xi) { return expr::eval(ast, set_env(xi)); },
        [dast, set_env](double xi) { return expr::eval(dast, set_env(xi)); });
}

namespace {

std::function<double(double)> fn_of_x(const std::string& text) {
    expr::NodePtr ast = expr::parse(text);
    return [ast](double x) {
        expr::Env env;
        env.x = x;
        return expr::eval(ast, env);
    };
}

std::function<double(double)> fn_of_t(const std::string& text) {
    expr::NodePtr ast = expr::parse(text);
    return [ast](double t) {
        expr::Env env;
        env.t = t;
        return expr::eval(ast, env);
    };
}

Source source_from_expr(const std::string& text) {
    expr::NodePtr ast = expr::parse(text);
    Source s;
    s.value = [ast](double x, double t, double u, double v) {
        expr::Env env{x, t, u, v, 0.0};
        return expr::eval(ast, env);
    };
    if (expr::depends_on(ast, 'u')) {
        expr::NodePtr d = expr::diff(ast, 'u');
        s.du = [d](double x, double t, double u, double v) {
            expr::Env env{x, t, u, v, 0.0};
            return expr::eval(d, env);
        };
    }
    if (expr::depends_on(ast, 'v')) {
        expr::NodePtr d = expr::diff(ast, 'v');
        s.dv = [d](double x, double t, double u, double v) {
            expr::Env env{x, t, u, v, 0.0};
            return expr::eval(d, env);
        };
    }
    return s;
}

Coupling coupling_from_config(const std::string& text) {
    if (text == "uv") return Coupling::product();
    if (text == "u2v") return Coupling::square_product();
    expr::NodePtr ast = expr::parse(text);
    expr::NodePtr du = expr::diff(ast, 'u');
    expr::NodePtr dv = expr::diff(ast, 'v');
    Coupling c;
    c.name = "custom";
    c.value = [ast](double u, double v) {
        expr::Env env{0.0, 0.0, u, v, 0.0};
        return expr::eval(ast, env);
    };
    c.du = [du](double u, double v) {
        expr::Env env{0.0, 0.0, u, v, 0.0};
        return expr::eval(du, env);
    };
    c.dv = [dv](double u, double v) {
        expr::Env env{0.0, 0.0, u, v, 0.0};
        return expr::eval(dv, env);
    };
    return c;
}

BoundaryCondition bc_from_config(const json& e, const std::string& path) {
    const std::string type = str_at(e, path, "type", "neumann");
    std::function<double(double)> data;
    if (e.contains("value")) {
        const json& v = e["value"];
        if (v.is_number()) {
            const double c = v.get<double>();
            data = c == 0.0 ? std::function<double(double)>{}
                            : std::function<double(double)>([c](double) { return c; });
        } else if (v.is_string()) {
            data = fn_of_t(v.get<std::string>());
        } else {
            throw ConfigError("config: '" + path + "/value' must be a number or expression");
        }
    }
    if (type == "dirichlet") return BoundaryCondition::dirichlet(std::move(data));
    if (type == "neumann") return BoundaryCondition::neumann(std::move(data));
    return BoundaryCondition::robin(num_at(e, path, "gamma", 0.0), std::move(data));
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    require_keys(doc, "", {"preset", "system", "grid", "mode", "sampling", "smoothing",
                           "inversion", "output"});
    ExperimentConfig cfg;
    cfg.preset = str_at(doc, "", "preset", "");
    if (doc.contains("system")) {
        cfg.system = doc["system"];
        require_keys(cfg.system, "system",
                     {"diffusion", "potential", "initial_u", "initial_v", "source_u",
                      "source_v", "coupling", "unknown", "beta", "beta_u", "beta_v", "f1",
                      "f2", "phi1", "phi2", "flux_u", "flux_v", "eigen_c", "bc"});
        if (cfg.system.contains("bc")) validate_bc_section(cfg.system["bc"]);
    }
    if (cfg.preset.empty() && cfg.system.empty())
        throw ConfigError("config: either 'preset' or 'system' is required");

    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        require_keys(g, "grid", {"nx", "nt", "length", "horizon"});
        cfg.grid = Grid(int_at(g, "grid", "nx", 200), int_at(g, "grid", "nt", 300),
                        num_at(g, "grid", "length", 1.0), num_at(g, "grid", "horizon", 1.0));
        cfg.grid_given = true;
    }
    if (doc.contains("mode")) {
        const std::string mode = doc["mode"].is_string() ? doc["mode"].get<std::string>() : "";
        if (mode == "final-time") cfg.mode = MeasurementKind::FinalTime;
        else if (mode == "time-trace") cfg.mode = MeasurementKind::TimeTrace;
        else throw ConfigError("config: 'mode' must be \"final-time\" or \"time-trace\"");
        cfg.mode_given = true;
    }
    if (doc.contains("sampling")) {
        const json& s = doc["sampling"];
        require_keys(s, "sampling", {"count", "noise", "seed", "point"});
        cfg.sampling.count = int_at(s, "sampling", "count", -1);
        cfg.sampling.noise = num_at(s, "sampling", "noise", 0.0);
        if (cfg.sampling.noise < 0.0)
            throw ConfigError("config: 'sampling/noise' must be >= 0");
        if (s.contains("seed")) cfg.sampling.seed = s["seed"].get<std::uint64_t>();
        const std::string point = str_at(s, "sampling", "point", "right");
        if (point != "left" && point != "right")
            throw ConfigError("config: 'sampling/point' must be left or right");
        cfg.sampling.point = point == "left" ? Endpoint::Left : Endpoint::Right;
    }
    if (doc.contains("smoothing")) {
        const json& s = doc["smoothing"];
        require_keys(s, "smoothing", {"enabled", "ncoef", "mu_spatial", "mu_temporal"});
        cfg.smoothing.enabled = bool_at(s, "smoothing", "enabled", true);
        cfg.smoothing.ncoef = int_at(s, "smoothing", "ncoef", -1);
        cfg.smoothing.mu_spatial = num_at(s, "smoothing", "mu_spatial", -1.0);
        cfg.smoothing.mu_temporal = num_at(s, "smoothing", "mu_temporal", -1.0);
    }
    if (doc.contains("inversion")) {
        const json& s = doc["inversion"];
        require_keys(s, "inversion", {"max_iters", "stagnation_tol", "ncenters", "ridge"});
        cfg.inversion.max_iters = int_at(s, "inversion", "max_iters", 12);
        cfg.inversion.stagnation_tol = num_at(s, "inversion", "stagnation_tol", 1e-8);
        cfg.inversion.ncenters = int_at(s, "inversion", "ncenters", RangedFn::kDefaultCenters);
        cfg.inversion.ridge = num_at(s, "inversion", "ridge", -1.0);
    }
    if (doc.contains("output")) {
        const json& s = doc["output"];
        require_keys(s, "output", {"dir", "svg"});
        cfg.output.dir = str_at(s, "output", "dir", "out");
        cfg.output.svg = bool_at(s, "output", "svg", true);
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Convert the byte offset into a line number for the diagnostic.
        size_t line = 1;
        for (size_t i = 0; i < std::min(text.size(), e.byte); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError("config: " + path + ": syntax error at line " +
                          std::to_string(line) + ": " + e.what());
    }
    return parse_config(doc);
}

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
    BuiltExperiment exp;
    exp.cfg = cfg;
    const json& sys = cfg.system;

    if (!cfg.preset.empty()) {
        PresetParams params;
        if (!sys.empty()) {
            // A preset accepts only its tunable parameters as overrides.
            require_keys(sys, "system",
                         {"beta", "beta_u", "beta_v", "coupling", "flux_u", "flux_v",
                          "eigen_c"});
            params.beta = num_at(sys, "system", "beta", params.beta);
            params.beta_u = num_at(sys, "system", "beta_u", params.beta_u);
            params.beta_v = num_at(sys, "system", "beta_v", params.beta_v);
            params.coupling = str_at(sys, "system", "coupling", params.coupling);
            params.flux_u = num_at(sys, "system", "flux_u", params.flux_u);
            params.flux_v = num_at(sys, "system", "flux_v", params.flux_v);
            params.eigen_c = num_at(sys, "system", "eigen_c", params.eigen_c);
        }
        params.horizon = cfg.grid_given ? cfg.grid.horizon : 1.0;
        ExperimentPreset preset = make_preset(cfg.preset, params);
        exp.spec = std::move(preset.spec);
        exp.grid = cfg.grid_given ? cfg.grid : preset.grid;
        exp.mode = cfg.mode_given ? cfg.mode : preset.default_mode;
        exp.truth = preset.truth;
        exp.has_truth = true;
        return exp;
    }

    // Explicit system.
    SystemSpec spec;
    spec.diffusion = num_at(sys, "system", "diffusion", 1.0);
    if (sys.contains("potential")) spec.potential = fn_of_x(sys["potential"].get<std::string>());
    if (!sys.contains("initial_u") || !sys.contains("initial_v"))
        throw ConfigError("config: explicit systems need 'system/initial_u' and 'initial_v'");
    spec.initial = {fn_of_x(sys["initial_u"].get<std::string>()),
                    fn_of_x(sys["initial_v"].get<std::string>())};
    if (sys.contains("source_u"))
        spec.sources[0] = source_from_expr(str_at(sys, "system", "source_u", ""));
    if (sys.contains("source_v"))
        spec.sources[1] = source_from_expr(str_at(sys, "system", "source_v", ""));
    spec.coupling = coupling_from_config(str_at(sys, "system", "coupling", "uv"));

    const std::string unknown = str_at(sys, "system", "unknown", "f-pair");
    if (unknown == "f-pair") {
        FPair slot;
        slot.beta = num_at(sys, "system", "beta", 0.0);
        if (!sys.contains("f1") || !sys.contains("f2"))
            throw ConfigError("config: f-pair systems need 'system/f1' and 'f2' targets");
        slot.f1 = scalar_fn_from_expr(sys["f1"].get<std::string>(), 'u');
        slot.f2 = scalar_fn_from_expr(sys["f2"].get<std::string>(), 'v');
        exp.truth = {[f = slot.f1](double xi) { return f(xi); },
                     [f = slot.f2](double xi) { return f(xi); }};
        spec.unknown = std::move(slot);
    } else if (unknown == "phi-pair") {
        PhiPair slot;
        slot.beta_u = num_at(sys, "system", "beta_u", 1.0);
        slot.beta_v = num_at(sys, "system", "beta_v", 1.0);
        if (!sys.contains("f1") || !sys.contains("f2"))
            throw ConfigError("config: phi-pair systems need known 'system/f1' and 'f2'");
        if (!sys.contains("phi1") || !sys.contains("phi2"))
            throw ConfigError("config: phi-pair systems need 'system/phi1' and 'phi2' targets");
        slot.f1 = scalar_fn_from_expr(sys["f1"].get<std::string>(), 'u');
        slot.f2 = scalar_fn_from_expr(sys["f2"].get<std::string>(), 'v');
        slot.phi1 = scalar_fn_from_expr(sys["phi1"].get<std::string>(), 'w');
        slot.phi2 = scalar_fn_from_expr(sys["phi2"].get<std::string>(), 'w');
        exp.truth = {[f = slot.phi1](double xi) { return f(xi); },
                     [f = slot.phi2](double xi) { return f(xi); }};
        spec.unknown = std::move(slot);
    } else {
        throw ConfigError("config: 'system/unknown' must be \"f-pair\" or \"phi-pair\"");
    }
    exp.has_truth = true;

    // Boundary conditions: homogeneous Dirichlet-left / Neumann-right unless
    // stated otherwise.
    for (int s = 0; s < 2; ++s) {
        spec.bc.at(s, Endpoint::Left) = BoundaryCondition::dirichlet();
        spec.bc.at(s, Endpoint::Right) = BoundaryCondition::neumann();
    }
    if (sys.contains("bc")) {
        const json& bc = sys["bc"];
        for (int s = 0; s < 2; ++s) {
            const char* name = s == 0 ? "u" : "v";
            if (!bc.contains(name)) continue;
            for (Endpoint e : {Endpoint::Left, Endpoint::Right}) {
                const char* end = e == Endpoint::Left ? "left" : "right";
                if (!bc[name].contains(end)) continue;
                spec.bc.at(s, e) = bc_from_config(
                    bc[name][end], std::string("system/bc/") + name + "/" + end);
            }
        }
    }

    exp.spec = std::move(spec);
    exp.grid = cfg.grid;
    exp.mode = cfg.mode;
    return exp;
}

}  // namespace rdinv
