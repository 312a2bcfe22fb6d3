#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rdinv/measurement.hpp"
#include "rdinv/ranged_fn.hpp"
#include "rdinv/system_spec.hpp"

namespace rdinv {

/// Dense working data on the grid nodes (nx spatial or nt temporal points):
/// values, first derivative, and (final-time only) second spatial derivative
/// per species.
struct SmoothedData {
    MeasurementKind kind = MeasurementKind::FinalTime;
    Endpoint trace_point = Endpoint::Right;
    std::vector<double> abscissae;
    std::array<std::vector<double>, 2> values;
    std::array<std::vector<double>, 2> deriv;
    std::array<std::vector<double>, 2> second;  // final-time only

    int size() const { return static_cast<int>(abscissae.size()); }
};

/// Projects final-time samples onto the eigenbasis of the species' endpoint
/// pattern with the spectral penalty mu * sum(lambda_n^2 c_n^2), then
/// evaluates the expansion and its derivatives densely.
/// ncoef <= 0 selects min(S, 20); mu < 0 selects the discrepancy principle
/// for noisy data and 1e-6 for noise-free data. Throws IllConditioned when
/// ncoef > S with mu == 0.
SmoothedData smooth_spatial(const Measurement& m, int ncoef, double mu,
                            const SystemSpec& spec, const Grid& grid);

/// Fits a dense curve through boundary time-trace samples by curvature-
/// penalized least squares on the nt-point grid with s(0) = anchor imposed,
/// and differentiates the result. mu < 0 selects the discrepancy principle
/// (noisy) or 1e-6 (noise-free).
SmoothedData smooth_temporal(const Measurement& m, double mu,
                             std::array<double, 2> anchors, const Grid& grid);

/// Piecewise-linear interpolation of the raw samples with finite-difference
/// derivatives; the no-filter baseline.
SmoothedData interpolate_raw(const Measurement& m, const Grid& grid);

/// [min, max] of the dense smoothed values of one species.
/// Throws DegenerateRange when max - min < 1e-12.
RangeInterval estimate_range(const SmoothedData& d, int species);

/// [min, max] of w(u, v) over the dense data.
RangeInterval estimate_composite_range(const SmoothedData& d, const Coupling& w);

/// min over the dense grid of |sum_j dw_i/dxi_j * d_j'| per species.
/// A null coupling means the identity slots w_i(xi) = xi_i.
std::array<double, 2> invertibility_margin(const SmoothedData& d,
                                           const Coupling* w = nullptr);

}  // namespace rdinv
