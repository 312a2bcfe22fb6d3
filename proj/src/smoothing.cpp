#include "rdinv/smoothing.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "rdinv/eigenbasis.hpp"
#include "rdinv/errors.hpp"

namespace rdinv {

namespace {

// 4th-order first derivative on a uniform grid, one-sided at the ends.
std::vector<double> fd_derivative(const std::vector<double>& y, double h) {
    const int n = static_cast<int>(y.size());
    std::vector<double> d(n);
    auto at = [&](int k) { return y[k]; };
    for (int k = 0; k < n; ++k) {
        if (k >= 2 && k <= n - 3)
            d[k] = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h);
        else if (k == 0)
            d[k] = (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) /
                   (12.0 * h);
        else if (k == 1)
            d[k] = (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) /
                   (12.0 * h);
        else if (k == n - 2)
            d[k] = -(-3.0 * at(n - 1) - 10.0 * at(n - 2) + 18.0 * at(n - 3) -
                     6.0 * at(n - 4) + at(n - 5)) /
                   (12.0 * h);
        else
            d[k] = -(-25.0 * at(n - 1) + 48.0 * at(n - 2) - 36.0 * at(n - 3) +
                     16.0 * at(n - 4) - 3.0 * at(n - 5)) /
                   (12.0 * h);
    }
    return d;
}

std::vector<double> fd_second(const std::vector<double>& y, double h) {
    const int n = static_cast<int>(y.size());
    std::vector<double> d(n);
    for (int k = 1; k < n - 1; ++k) d[k] = (y[k - 1] - 2.0 * y[k] + y[k + 1]) / (h * h);
    d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (h * h);
    d[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / (h * h);
    return d;
}

// Smallest mu whose data residual reaches the discrepancy target; residual2
// must be non-decreasing in mu.
double pick_mu_discrepancy(const std::function<double(double)>& residual2, double target2) {
    double lo = 1e-16, hi = 1e6;
    if (residual2(lo) >= target2) return lo;
    if (residual2(hi) <= target2) return hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (residual2(mid) < target2) lo = mid;
        else hi = mid;
    }
    return std::sqrt(lo * hi);
}

double noise_amplitude(const Measurement& m, int species) {
    double a = 0.0;
    for (double y : m.values[species]) a = std::max(a, std::abs(y));
    return a * m.noise_level;
}

}  // namespace

SmoothedData smooth_spatial(const Measurement& m, int ncoef, double mu,
                            const SystemSpec& spec, const Grid& grid) {
    if (m.kind != MeasurementKind::FinalTime)
        throw std::invalid_argument("smooth_spatial: final-time measurement required");
    const int S = m.count();
    if (ncoef <= 0) ncoef = std::min(S, 20);
    if (ncoef > S && mu == 0.0)
        throw IllConditioned("smooth_spatial: ncoef > S with no penalty");

    // Constant-coefficient check for the closed-form eigenbasis.
    double q0 = spec.q_at(0.0);
    for (int j = 0; j < grid.nx; ++j) {
        const double qj = spec.q_at(grid.x(j));
        if (std::abs(qj - q0) > 1e-13 * (1.0 + std::abs(q0)))
            throw UnsupportedBC("smooth_spatial: potential must be constant");
    }

    SmoothedData out;
    out.kind = MeasurementKind::FinalTime;
    out.abscissae.resize(grid.nx);
    for (int j = 0; j < grid.nx; ++j) out.abscissae[j] = grid.x(j);

    for (int s = 0; s < 2; ++s) {
        const EigenPattern pattern = classify_pattern(spec.bc, s);
        Eigen::MatrixXd Phi(S, ncoef);
        Eigen::VectorXd lambda(ncoef);
        for (int n = 0; n < ncoef; ++n) {
            lambda(n) = eigen_value(n + 1, pattern, grid.length, spec.diffusion, q0);
            for (int j = 0; j < S; ++j)
                Phi(j, n) = eigen_fn(n + 1, pattern, grid.length, m.abscissae[j]);
        }
        const Eigen::VectorXd y =
            Eigen::Map<const Eigen::VectorXd>(m.values[s].data(), S);
        const Eigen::MatrixXd gram = Phi.transpose() * Phi;
        const Eigen::VectorXd proj = Phi.transpose() * y;

        auto solve_for = [&](double mu_eff) -> Eigen::VectorXd {
            Eigen::MatrixXd normal = gram;
            for (int n = 0; n < ncoef; ++n) normal(n, n) += mu_eff * lambda(n) * lambda(n);
            return normal.ldlt().solve(proj);
        };

        double mu_s = mu;
        if (mu_s < 0.0) {
            if (m.noise_level > 0.0) {
                const double amp = noise_amplitude(m, s);
                const double target2 = S * amp * amp / 3.0;  // E|U(-a,a)|^2 = a^2/3
                mu_s = pick_mu_discrepancy(
                    [&](double t) { return (Phi * solve_for(t) - y).squaredNorm(); },
                    target2);
            } else {
                mu_s = 1e-6;
            }
        }
        const Eigen::VectorXd c = solve_for(mu_s);

        out.values[s].assign(grid.nx, 0.0);
        out.deriv[s].assign(grid.nx, 0.0);
        out.second[s].assign(grid.nx, 0.0);
        for (int n = 0; n < ncoef; ++n) {
            for (int j = 0; j < grid.nx; ++j) {
                const double x = grid.x(j);
                out.values[s][j] += c(n) * eigen_fn(n + 1, pattern, grid.length, x);
                out.deriv[s][j] += c(n) * eigen_fn_d1(n + 1, pattern, grid.length, x);
                out.second[s][j] += c(n) * eigen_fn_d2(n + 1, pattern, grid.length, x);
            }
        }
    }
    return out;
}

SmoothedData smooth_temporal(const Measurement& m, double mu, std::array<double, 2> anchors,
                             const Grid& grid) {
    if (m.kind != MeasurementKind::TimeTrace)
        throw std::invalid_argument("smooth_temporal: time-trace measurement required");
    const int n = grid.nt;
    const int S = m.count();
    const double dt = grid.dt();

    // Each sample contributes through linear interpolation between its two
    // neighbouring grid nodes, so off-node abscissae are handled exactly.
    std::vector<int> idx(S);
    std::vector<double> frac(S);
    for (int j = 0; j < S; ++j) {
        const double pos = std::clamp(m.abscissae[j] / dt, 0.0, static_cast<double>(n - 1));
        int k = std::min(static_cast<int>(pos), n - 2);
        idx[j] = k;
        frac[j] = pos - k;
    }

    SmoothedData out;
    out.kind = MeasurementKind::TimeTrace;
    out.trace_point = m.trace_point;
    out.abscissae.resize(n);
    for (int k = 0; k < n; ++k) out.abscissae[k] = grid.t(k);

    for (int s = 0; s < 2; ++s) {
        const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(m.values[s].data(), S);

        // Data term + curvature penalty (mu/dt^3) * sum (second difference)^2,
        // the discrete form of mu * int (s'')^2 dt.
        Eigen::MatrixXd data_gram = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd data_rhs = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < S; ++j) {
            const int k = idx[j];
            const double w1 = frac[j], w0 = 1.0 - frac[j];
            data_gram(k, k) += w0 * w0;
            data_gram(k, k + 1) += w0 * w1;
            data_gram(k + 1, k) += w1 * w0;
            data_gram(k + 1, k + 1) += w1 * w1;
            data_rhs(k) += w0 * y(j);
            data_rhs(k + 1) += w1 * y(j);
        }
        Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(n, n);
        for (int k = 1; k < n - 1; ++k) {
            const int cols[3] = {k - 1, k, k + 1};
            const double w[3] = {1.0, -2.0, 1.0};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) penalty(cols[a], cols[b]) += w[a] * w[b];
        }

        auto solve_for = [&](double mu_eff) -> Eigen::VectorXd {
            Eigen::MatrixXd Msys = data_gram + (mu_eff / (dt * dt * dt)) * penalty;
            Eigen::VectorXd b = data_rhs;
            // Impose s(0) = anchor by row/column substitution.
            b -= Msys.col(0) * anchors[s];
            Msys.row(0).setZero();
            Msys.col(0).setZero();
            Msys(0, 0) = 1.0;
            b(0) = anchors[s];
            return Msys.ldlt().solve(b);
        };

        auto residual2 = [&](double mu_eff) {
            const Eigen::VectorXd sol = solve_for(mu_eff);
            double r2 = 0.0;
            for (int j = 0; j < S; ++j) {
                const double pred =
                    (1.0 - frac[j]) * sol(idx[j]) + frac[j] * sol(idx[j] + 1);
                const double e = pred - y(j);
                r2 += e * e;
            }
            return r2;
        };

        double mu_s = mu;
        if (mu_s < 0.0) {
            if (m.noise_level > 0.0) {
                const double amp = noise_amplitude(m, s);
                mu_s = pick_mu_discrepancy(residual2, S * amp * amp / 3.0);
            } else {
                mu_s = 1e-10;
            }
        }
        if (mu_s == 0.0) mu_s = 1e-14;  // keep the system nonsingular

        const Eigen::VectorXd sol = solve_for(mu_s);
        out.values[s].assign(sol.data(), sol.data() + n);
        out.deriv[s] = fd_derivative(out.values[s], dt);
    }
    return out;
}

SmoothedData interpolate_raw(const Measurement& m, const Grid& grid) {
    const bool spatial = m.kind == MeasurementKind::FinalTime;
    const int n = spatial ? grid.nx : grid.nt;
    const double h = spatial ? grid.dx() : grid.dt();

    SmoothedData out;
    out.kind = m.kind;
    out.trace_point = m.trace_point;
    out.abscissae.resize(n);
    for (int k = 0; k < n; ++k) out.abscissae[k] = spatial ? grid.x(k) : grid.t(k);

    const int S = m.count();
    for (int s = 0; s < 2; ++s) {
        out.values[s].resize(n);
        for (int k = 0; k < n; ++k) {
            const double a = out.abscissae[k];
            if (a <= m.abscissae.front()) {
                out.values[s][k] = m.values[s].front();
                continue;
            }
            if (a >= m.abscissae.back()) {
                out.values[s][k] = m.values[s].back();
                continue;
            }
            const auto it =
                std::upper_bound(m.abscissae.begin(), m.abscissae.end(), a);
            const int j = static_cast<int>(it - m.abscissae.begin());
            const double t =
                (a - m.abscissae[j - 1]) / (m.abscissae[j] - m.abscissae[j - 1]);
            out.values[s][k] = (1.0 - t) * m.values[s][j - 1] + t * m.values[s][j];
        }
        out.deriv[s] = fd_derivative(out.values[s], h);
        if (spatial) out.second[s] = fd_second(out.values[s], h);
    }
    (void)S;
    return out;
}

RangeInterval estimate_range(const SmoothedData& d, int species) {
    double lo = d.values[species][0], hi = lo;
    for (double y : d.values[species]) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    if (hi - lo < 1e-12)
        throw DegenerateRange("constant data cannot support reconstruction");
    return RangeInterval(lo, hi);
}

RangeInterval estimate_composite_range(const SmoothedData& d, const Coupling& w) {
    double lo = w(d.values[0][0], d.values[1][0]), hi = lo;
    for (int k = 0; k < d.size(); ++k) {
        const double y = w(d.values[0][k], d.values[1][k]);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    if (hi - lo < 1e-12)
        throw DegenerateRange("composite data range is degenerate");
    return RangeInterval(lo, hi);
}

std::array<double, 2> invertibility_margin(const SmoothedData& d, const Coupling* w) {
    std::array<double, 2> margin{};
    if (!w) {
        for (int s = 0; s < 2; ++s) {
            double m = std::abs(d.deriv[s][0]);
            for (double dv : d.deriv[s]) m = std::min(m, std::abs(dv));
            margin[s] = m;
        }
        return margin;
    }
    double m = -1.0;
    for (int k = 0; k < d.size(); ++k) {
        const double u = d.values[0][k], v = d.values[1][k];
        const double chain =
            std::abs(w->du(u, v) * d.deriv[0][k] + w->dv(u, v) * d.deriv[1][k]);
        m = m < 0.0 ? chain : std::min(m, chain);
    }
    margin[0] = margin[1] = m;
    return margin;
}

}  // namespace rdinv
