#pragma once

#include <functional>
#include <string>
#include <variant>

#include "rdinv/boundary.hpp"
#include "rdinv/ranged_fn.hpp"

namespace rdinv {

/// Univariate function slot with an analytic derivative. Either an exact
/// closed-form function (data generation, known model parts) or a RangedFn
/// iterate (reconstruction), in which case evaluation clamps into J.
class ScalarFn {
public:
    ScalarFn() = default;  // zero function

    static ScalarFn analytic(std::function<double(double)> value,
                             std::function<double(double)> deriv) {
        ScalarFn f;
        f.value_ = std::move(value);
        f.deriv_ = std::move(deriv);
        return f;
    }
    static ScalarFn ranged(RangedFn fn) {
        ScalarFn f;
        f.ranged_ = std::move(fn);
        f.is_ranged_ = true;
        return f;
    }

    void eval(double xi, double& value, double& deriv) const {
        if (is_ranged_) {
            ranged_.eval(xi, value, deriv);
            return;
        }
        value = value_ ? value_(xi) : 0.0;
        deriv = deriv_ ? deriv_(xi) : 0.0;
    }
    double operator()(double xi) const {
        if (is_ranged_) return ranged_(xi);
        return value_ ? value_(xi) : 0.0;
    }
    double deriv(double xi) const {
        if (is_ranged_) return ranged_.derivative(xi);
        return deriv_ ? deriv_(xi) : 0.0;
    }

    bool is_ranged() const { return is_ranged_; }
    const RangedFn& ranged_fn() const { return ranged_; }

private:
    std::function<double(double)> value_;
    std::function<double(double)> deriv_;
    RangedFn ranged_;
    bool is_ranged_ = false;
};

/// Known interaction variable w(u,v) with evaluable partial derivatives.
struct Coupling {
    std::string name = "uv";
    std::function<double(double, double)> value;
    std::function<double(double, double)> du;
    std::function<double(double, double)> dv;

    double operator()(double u, double v) const { return value(u, v); }

    /// w = u*v (the near universal ecological choice).
    static Coupling product();
    /// w = u^2 * v (activator-inhibitor / autocatalytic coupling).
    static Coupling square_product();
};

/// Known source r(x,t,u,v) with optional state partials.
struct Source {
    std::function<double(double, double, double, double)> value;  // (x,t,u,v)
    std::function<double(double, double, double, double)> du;
    std::function<double(double, double, double, double)> dv;

    double operator()(double x, double t, double u, double v) const {
        return value ? value(x, t, u, v) : 0.0;
    }
    double d_u(double x, double t, double u, double v) const {
        return du ? du(x, t, u, v) : 0.0;
    }
    double d_v(double x, double t, double u, double v) const {
        return dv ? dv(x, t, u, v) : 0.0;
    }

    static Source of_xt(std::function<double(double, double)> fn) {
        Source s;
        s.value = [fn = std::move(fn)](double x, double t, double, double) { return fn(x, t); };
        return s;
    }
};

/// Unknown slot: the pair {f1(u), f2(v)} with a known coupling multiple
/// beta * w(u,v) added to both equations.
struct FPair {
    ScalarFn f1, f2;
    double beta = 0.0;
};

/// Unknown slot: the pair {phi1(w), phi2(w)} entering as beta_u * phi1(w)
/// and beta_v * phi2(w), with known reactions f1(u), f2(v).
struct PhiPair {
    ScalarFn f1, f2;
    ScalarFn phi1, phi2;
    double beta_u = 1.0;
    double beta_v = 1.0;
};

/// Full problem description of the coupled two-species system
///   u_t = a u_xx - q(x) u + [f1(u) + beta w(u,v)            + r1(x,t,u,v)]
///   v_t = a v_xx - q(x) v + [f2(v) + beta w(u,v)            + r2(x,t,u,v)]
/// or, in interaction mode,
///   u_t = a u_xx - q(x) u + [f1(u) + beta_u phi1(w(u,v))    + r1(x,t,u,v)]
///   v_t = a v_xx - q(x) v + [f2(v) + beta_v phi2(w(u,v))    + r2(x,t,u,v)]
/// on (0,L) x (0,T) with per-species Dirichlet/Neumann/Robin endpoints.
struct SystemSpec {
    double diffusion = 1.0;
    std::function<double(double)> potential;  // q(x); empty means 0
    std::array<std::function<double(double)>, 2> initial;
    std::array<Source, 2> sources;
    Coupling coupling = Coupling::product();
    std::variant<FPair, PhiPair> unknown = FPair{};
    BoundarySpec bc;

    double q_at(double x) const { return potential ? potential(x) : 0.0; }

    /// Reaction value and state partials for both species at one node.
    struct ReactionEval {
        double g[2];
        double gu[2];
        double gv[2];
    };
    ReactionEval reaction(double x, double t, double u, double v) const;

    /// Copy with the unknown pair replaced by reconstruction iterates.
    SystemSpec with_iterates(RangedFn a, RangedFn b) const;

    /// The unknown pair as ScalarFn slots (f-pair or phi-pair).
    std::array<const ScalarFn*, 2> unknown_pair() const;

    bool is_phi_mode() const { return std::holds_alternative<PhiPair>(unknown); }
};

}  // namespace rdinv
