#include "rdinv/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "rdinv/errors.hpp"

namespace rdinv {

DecayFit decay_fit(const Trajectory& traj) {
    const Grid& g = traj.grid;
    if (g.nt < 20) throw GridTooCoarse("decay_fit needs nt >= 20");
    const double dt = g.dt();

    // m(t_k) = max_x |D_t u(x,t)| by central time differencing.
    std::vector<double> tvals, logm;
    const double t_start = g.horizon / 10.0;  // skip the transient
    for (int k = 1; k < g.nt - 1; ++k) {
        const double t = g.t(k);
        if (t < t_start) continue;
        double m = 0.0;
        for (int j = 0; j < g.nx; ++j) {
            double norm2 = 0.0;
            for (int s = 0; s < 2; ++s) {
                const double d = (traj.at(s, k + 1, j) - traj.at(s, k - 1, j)) / (2.0 * dt);
                norm2 += d * d;
            }
            m = std::max(m, std::sqrt(norm2));
        }
        if (m > 0.0) {
            tvals.push_back(t);
            logm.push_back(std::log(m));
        }
    }
    if (tvals.size() < 3) throw GridTooCoarse("decay_fit: too few usable time levels");

    // Least squares log m = log C2 - c2 t.
    const size_t n = tvals.size();
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (size_t i = 0; i < n; ++i) {
        st += tvals[i];
        sy += logm[i];
        stt += tvals[i] * tvals[i];
        sty += tvals[i] * logm[i];
    }
    const double denom = n * stt - st * st;
    const double slope = (n * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / n;

    DecayFit fit;
    fit.c2 = -slope;
    fit.C2 = std::exp(intercept);
    double r2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double e = logm[i] - (intercept + slope * tvals[i]);
        r2 += e * e;
    }
    fit.residual = std::sqrt(r2 / n);
    return fit;
}

DissipativityReport dissipativity_check(const SystemSpec& spec, const RangeInterval& Iu,
                                        const RangeInterval& Iv, double c_Q, int nsamples) {
    if (nsamples < 2) throw std::invalid_argument("dissipativity_check: nsamples >= 2");
    DissipativityReport rep;
    rep.nsamples = nsamples;
    rep.margin_grid.resize(static_cast<size_t>(nsamples) * nsamples);
    bool first = true;
    for (int i = 0; i < nsamples; ++i) {
        const double u = Iu.lo + Iu.width() * i / (nsamples - 1);
        for (int j = 0; j < nsamples; ++j) {
            const double v = Iv.lo + Iv.width() * j / (nsamples - 1);
            // State derivatives of the full right-hand side; x,t enter only
            // through the known sources, which are sampled at x = t = 0.
            const SystemSpec::ReactionEval re = spec.reaction(0.0, 0.0, u, v);
            const double A = -re.gu[0] - c_Q;
            const double B = -re.gv[0];
            const double C = -re.gu[1];
            const double D = -re.gv[1] - c_Q;
            const double det_margin = 4.0 * A * D - (B + C) * (B + C);
            const double margin = std::min({A, D, det_margin});
            rep.margin_grid[static_cast<size_t>(i) * nsamples + j] = margin;
            if (first || margin < rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_u = u;
                rep.worst_v = v;
                first = false;
            }
        }
    }
    rep.holds = rep.worst_margin >= 0.0;
    return rep;
}

double competing_beta_bound(const ScalarFn& f1, const ScalarFn& f2, const RangeInterval& Iu,
                            const RangeInterval& Iv, int ngrid) {
    if (ngrid < 2) throw std::invalid_argument("competing_beta_bound: ngrid >= 2");
    const double f1p0 = f1.deriv(Iu.lo);
    const double f2p0 = f2.deriv(Iv.lo);

    auto one_sided = [&](const ScalarFn& f, const RangeInterval& I, double other_slope0) {
        double bound = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= ngrid; ++i) {
            const double s = I.lo + I.width() * i / ngrid;  // (lo, hi], excludes the origin
            const double fp = f.deriv(s);
            if (fp > 1e-12) throw NotDissipative("competing_beta_bound: f' > 0 on the range");
            const double disc = fp * fp + other_slope0 * fp;  // f'^2 + f2'(0) f1' >= 0
            const double val = (2.0 / s) * (-fp + std::sqrt(std::max(0.0, disc)));
            bound = std::min(bound, val);
        }
        return bound;
    };

    if (f1p0 > 1e-12 || f2p0 > 1e-12)
        throw NotDissipative("competing_beta_bound: f' > 0 at the range origin");
    return std::min(one_sided(f1, Iu, f2p0), one_sided(f2, Iv, f1p0));
}

RangeConditionReport range_condition_check(const Trajectory& traj, const RangeInterval& Ju,
                                           const RangeInterval& Jv) {
    RangeConditionReport rep;
    const RangeInterval J[2] = {Ju, Jv};
    const size_t nodes = traj.values[0].size();
    for (int s = 0; s < 2; ++s) {
        size_t violations = 0;
        double excursion = 0.0;
        for (double y : traj.values[s]) {
            if (y < J[s].lo) {
                ++violations;
                excursion = std::max(excursion, J[s].lo - y);
            } else if (y > J[s].hi) {
                ++violations;
                excursion = std::max(excursion, y - J[s].hi);
            }
        }
        rep.violation_fraction[s] = static_cast<double>(violations) / nodes;
        rep.max_excursion[s] = excursion;
    }
    return rep;
}

}  // namespace rdinv
