#include "rdinv/system_spec.hpp"

namespace rdinv {

Coupling Coupling::product() {
    Coupling c;
    c.name = "uv";
    c.value = [](double u, double v) { return u * v; };
    c.du = [](double, double v) { return v; };
    c.dv = [](double u, double) { return u; };
    return c;
}

Coupling Coupling::square_product() {
    Coupling c;
    c.name = "u2v";
    c.value = [](double u, double v) { return u * u * v; };
    c.du = [](double u, double v) { return 2.0 * u * v; };
    c.dv = [](double u, double) { return u * u; };
    return c;
}

SystemSpec::ReactionEval SystemSpec::reaction(double x, double t, double u, double v) const {
    ReactionEval r{};
    double f1, df1, f2, df2;
    if (const FPair* fp = std::get_if<FPair>(&unknown)) {
        fp->f1.eval(u, f1, df1);
        fp->f2.eval(v, f2, df2);
        const double w_u = coupling.du(u, v);
        const double w_v = coupling.dv(u, v);
        const double bw = fp->beta * coupling.value(u, v);
        r.g[0] = f1 + bw;
        r.g[1] = f2 + bw;
        r.gu[0] = df1 + fp->beta * w_u;
        r.gv[0] = fp->beta * w_v;
        r.gu[1] = fp->beta * w_u;
        r.gv[1] = df2 + fp->beta * w_v;
    } else {
        const PhiPair& pp = std::get<PhiPair>(unknown);
        pp.f1.eval(u, f1, df1);
        pp.f2.eval(v, f2, df2);
        const double w = coupling.value(u, v);
        const double w_u = coupling.du(u, v);
        const double w_v = coupling.dv(u, v);
        double p1, dp1, p2, dp2;
        pp.phi1.eval(w, p1, dp1);
        pp.phi2.eval(w, p2, dp2);
        r.g[0] = f1 + pp.beta_u * p1;
        r.g[1] = f2 + pp.beta_v * p2;
        r.gu[0] = df1 + pp.beta_u * dp1 * w_u;
        r.gv[0] = pp.beta_u * dp1 * w_v;
        r.gu[1] = pp.beta_v * dp2 * w_u;
        r.gv[1] = df2 + pp.beta_v * dp2 * w_v;
    }
    for (int s = 0; s < 2; ++s) {
        const Source& src = sources[s];
        if (src.value) r.g[s] += src.value(x, t, u, v);
        if (src.du) r.gu[s] += src.du(x, t, u, v);
        if (src.dv) r.gv[s] += src.dv(x, t, u, v);
    }
    return r;
}

SystemSpec SystemSpec::with_iterates(RangedFn a, RangedFn b) const {
    SystemSpec out = *this;
    if (const FPair* fp = std::get_if<FPair>(&out.unknown)) {
        FPair next = *fp;
        next.f1 = ScalarFn::ranged(std::move(a));
        next.f2 = ScalarFn::ranged(std::move(b));
        out.unknown = std::move(next);
    } else {
        PhiPair next = std::get<PhiPair>(out.unknown);
        next.phi1 = ScalarFn::ranged(std::move(a));
        next.phi2 = ScalarFn::ranged(std::move(b));
        out.unknown = std::move(next);
    }
    return out;
}

std::array<const ScalarFn*, 2> SystemSpec::unknown_pair() const {
    if (const FPair* fp = std::get_if<FPair>(&unknown)) return {&fp->f1, &fp->f2};
    const PhiPair& pp = std::get<PhiPair>(unknown);
    return {&pp.phi1, &pp.phi2};
}

}  // namespace rdinv
