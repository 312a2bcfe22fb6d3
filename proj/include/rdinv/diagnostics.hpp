#pragma once

#include <array>
#include <vector>

#include "rdinv/grid.hpp"
#include "rdinv/ranged_fn.hpp"
#include "rdinv/system_spec.hpp"

namespace rdinv {

/// Log-linear fit of max_x |D_t u(x,t)| ~ C2 exp(-c2 t) over [T/10, T].
/// c2 is reported with sign: negative means growth.
struct DecayFit {
    double C2 = 0.0;
    double c2 = 0.0;
    double residual = 0.0;  // RMS residual of the log-linear fit
};

DecayFit decay_fit(const Trajectory& traj);

/// Pointwise 2x2 nonnegative-definiteness test of -M - c_Q*id over a sample
/// grid of state values, where M collects the state derivatives of the full
/// reaction right-hand side.
struct DissipativityReport {
    bool holds = false;
    double worst_margin = 0.0;  // min over samples of min(A, D, 4AD-(B+C)^2)
    double worst_u = 0.0;
    double worst_v = 0.0;
    int nsamples = 0;
    std::vector<double> margin_grid;  // row-major over (u, v) samples
};

DissipativityReport dissipativity_check(const SystemSpec& spec, const RangeInterval& Iu,
                                        const RangeInterval& Iv, double c_Q, int nsamples);

/// Largest coupling strength compatible with dissipativity of the
/// competing-species pair, evaluated by grid minimization of the two
/// closed-form expressions. Requires f1' <= 0 and f2' <= 0 on the ranges.
double competing_beta_bound(const ScalarFn& f1, const ScalarFn& f2, const RangeInterval& Iu,
                            const RangeInterval& Iv, int ngrid);

/// Fraction of space-time nodes outside the observable ranges and the
/// largest excursion; zero excursion means the range condition holds
/// discretely.
struct RangeConditionReport {
    std::array<double, 2> violation_fraction{0.0, 0.0};
    std::array<double, 2> max_excursion{0.0, 0.0};
    bool holds() const { return max_excursion[0] == 0.0 && max_excursion[1] == 0.0; }
};

RangeConditionReport range_condition_check(const Trajectory& traj, const RangeInterval& Ju,
                                           const RangeInterval& Jv);

}  // namespace rdinv
