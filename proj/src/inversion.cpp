#include "rdinv/inversion.hpp"

#include <cmath>

#include "rdinv/errors.hpp"

namespace rdinv {

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "Converged";
        case Verdict::Stagnated: return "Stagnated";
        case Verdict::Diverged: return "Diverged";
        case Verdict::BlowUp: return "BlowUp";
    }
    return "?";
}

InverseProblem make_problem(SystemSpec spec, Grid grid, MeasurementKind mode,
                            SmoothedData data, Measurement raw) {
    if (data.kind != mode || raw.kind != mode)
        throw std::invalid_argument("make_problem: data kind does not match mode");
    const int expected = mode == MeasurementKind::FinalTime ? grid.nx : grid.nt;
    if (data.size() != expected)
        throw std::invalid_argument("make_problem: dense data size does not match grid");

    InverseProblem prob;
    prob.spec = std::move(spec);
    prob.grid = grid;
    prob.mode = mode;
    prob.data = std::move(data);
    prob.raw = std::move(raw);
    if (prob.spec.is_phi_mode()) {
        const RangeInterval J = estimate_composite_range(prob.data, prob.spec.coupling);
        prob.ranges = {J, J};
    } else {
        prob.ranges = {estimate_range(prob.data, 0), estimate_range(prob.data, 1)};
    }
    return prob;
}

namespace {

Trajectory solve_iterate(const SystemSpec& spec, const InverseProblem& prob) {
    try {
        return solve_forward(spec, prob.grid, prob.solver);
    } catch (const BlowUp& e) {
        throw ForwardFailure(e.what(), true);
    } catch (const NewtonDivergence& e) {
        throw ForwardFailure(e.what(), false);
    }
}

std::pair<RangedFn, RangedFn> fit_pair(const std::array<std::vector<double>, 2>& abscissae,
                                       const std::array<std::vector<double>, 2>& rhs,
                                       const InverseProblem& prob) {
    RangedFn g1 = RangedFn::fit_from_pairs(abscissae[0], rhs[0], prob.ranges[0],
                                           prob.ncenters, prob.ridge);
    RangedFn g2 = RangedFn::fit_from_pairs(abscissae[1], rhs[1], prob.ranges[1],
                                           prob.ncenters, prob.ridge);
    return {std::move(g1), std::move(g2)};
}

}  // namespace

std::pair<RangedFn, RangedFn> step_f_finaltime(const RangedFn& f1, const RangedFn& f2,
                                               const InverseProblem& prob) {
    const SystemSpec spec_k = prob.spec.with_iterates(f1, f2);
    const Trajectory traj = solve_iterate(spec_k, prob);
    const Fields dT = time_derivative_at_T(traj);

    const FPair& slot = std::get<FPair>(prob.spec.unknown);
    const double T = prob.grid.horizon;
    const double a = prob.spec.diffusion;
    const int n = prob.data.size();

    std::array<std::vector<double>, 2> rhs;
    for (int s = 0; s < 2; ++s) {
        rhs[s].resize(n);
        for (int j = 0; j < n; ++j) {
            const double x = prob.data.abscissae[j];
            const double gu = prob.data.values[0][j];
            const double gv = prob.data.values[1][j];
            const double gs = s == 0 ? gu : gv;
            const double elliptic = a * prob.data.second[s][j] - prob.spec.q_at(x) * gs;
            rhs[s][j] = dT[s][j] - elliptic - slot.beta * prob.spec.coupling(gu, gv) -
                        prob.spec.sources[s](x, T, gu, gv);
        }
    }
    return fit_pair(prob.data.values, rhs, prob);
}

std::pair<RangedFn, RangedFn> step_f_timetrace(const RangedFn& f1, const RangedFn& f2,
                                               const InverseProblem& prob) {
    const SystemSpec spec_k = prob.spec.with_iterates(f1, f2);
    const Trajectory traj = solve_iterate(spec_k, prob);
    const Fields lap = laplacian_at_boundary(traj, prob.data.trace_point, prob.spec);

    const FPair& slot = std::get<FPair>(prob.spec.unknown);
    const double x0 =
        prob.data.trace_point == Endpoint::Left ? 0.0 : prob.grid.length;
    const int n = prob.data.size();

    std::array<std::vector<double>, 2> rhs;
    for (int s = 0; s < 2; ++s) {
        rhs[s].resize(n);
        for (int k = 0; k < n; ++k) {
            const double t = prob.data.abscissae[k];
            const double hu = prob.data.values[0][k];
            const double hv = prob.data.values[1][k];
            rhs[s][k] = prob.data.deriv[s][k] - lap[s][k] -
                        slot.beta * prob.spec.coupling(hu, hv) -
                        prob.spec.sources[s](x0, t, hu, hv);
        }
    }
    return fit_pair(prob.data.values, rhs, prob);
}

std::pair<RangedFn, RangedFn> step_phi(const RangedFn& p1, const RangedFn& p2,
                                       const InverseProblem& prob, MeasurementKind mode) {
    const PhiPair& slot = std::get<PhiPair>(prob.spec.unknown);
    if (slot.beta_u == 0.0 || slot.beta_v == 0.0)
        throw ZeroMultiplier("step_phi: interaction multipliers must be nonzero");

    const SystemSpec spec_k = prob.spec.with_iterates(p1, p2);
    const Trajectory traj = solve_iterate(spec_k, prob);

    const int n = prob.data.size();
    const double a = prob.spec.diffusion;
    std::array<std::vector<double>, 2> rhs;
    std::vector<double> composite(n);
    for (int k = 0; k < n; ++k)
        composite[k] = prob.spec.coupling(prob.data.values[0][k], prob.data.values[1][k]);

    if (mode == MeasurementKind::FinalTime) {
        const Fields dT = time_derivative_at_T(traj);
        const double T = prob.grid.horizon;
        for (int s = 0; s < 2; ++s) {
            rhs[s].resize(n);
            const ScalarFn& known = s == 0 ? slot.f1 : slot.f2;
            const double beta = s == 0 ? slot.beta_u : slot.beta_v;
            for (int j = 0; j < n; ++j) {
                const double x = prob.data.abscissae[j];
                const double gs = prob.data.values[s][j];
                const double elliptic = a * prob.data.second[s][j] - prob.spec.q_at(x) * gs;
                rhs[s][j] = (dT[s][j] - elliptic - known(gs) -
                             prob.spec.sources[s](x, T, prob.data.values[0][j],
                                                  prob.data.values[1][j])) /
                            beta;
            }
        }
    } else {
        const Fields lap = laplacian_at_boundary(traj, prob.data.trace_point, prob.spec);
        const double x0 =
            prob.data.trace_point == Endpoint::Left ? 0.0 : prob.grid.length;
        for (int s = 0; s < 2; ++s) {
            rhs[s].resize(n);
            const ScalarFn& known = s == 0 ? slot.f1 : slot.f2;
            const double beta = s == 0 ? slot.beta_u : slot.beta_v;
            for (int k = 0; k < n; ++k) {
                const double t = prob.data.abscissae[k];
                const double hs = prob.data.values[s][k];
                rhs[s][k] = (prob.data.deriv[s][k] - lap[s][k] - known(hs) -
                             prob.spec.sources[s](x0, t, prob.data.values[0][k],
                                                  prob.data.values[1][k])) /
                            beta;
            }
        }
    }
    return fit_pair({composite, composite}, rhs, prob);
}

double error_norm(const RangedFn& f, const std::function<double(double)>& truth,
                  const RangeInterval& J) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < StoredProfile::kPoints; ++i) {
        const double xi = J.lo + J.width() * i / (StoredProfile::kPoints - 1);
        const double ft = truth(xi);
        const double d = f(xi) - ft;
        num += d * d;
        den += ft * ft;
    }
    num = std::sqrt(num / StoredProfile::kPoints);
    den = std::sqrt(den / StoredProfile::kPoints);
    return den < 1e-14 ? num : num / den;
}

namespace {

double profile_distance(const StoredProfile& a, const StoredProfile& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        num += d * d;
        den += b.values[i] * b.values[i];
    }
    num = std::sqrt(num / a.values.size());
    den = std::sqrt(den / a.values.size());
    return den < 1e-14 ? num : num / den;
}

// Geometric-mean contraction ratio over the decaying segment of the
// monitored sequence (down to its minimum).
void finalize_q(ReconstructionResult& res, const std::vector<double>& monitored,
                bool has_truth) {
    if (has_truth) {
        if (monitored.size() < 2 || monitored[0] <= 0.0) return;
        size_t kmin = 0;
        for (size_t k = 1; k < monitored.size(); ++k)
            if (monitored[k] < monitored[kmin]) kmin = k;
        if (kmin >= 1)
            res.contraction_q =
                std::pow(monitored[kmin] / monitored[0], 1.0 / static_cast<double>(kmin));
        return;
    }
    // Without truth the successive-iterate distances play the same role.
    if (monitored.size() >= 2 && monitored.front() > 0.0) {
        const double q = std::pow(monitored.back() / monitored.front(),
                                  1.0 / static_cast<double>(monitored.size() - 1));
        if (monitored.back() < monitored.front()) res.contraction_q = q;
    }
}

}  // namespace

ReconstructionResult run(const InverseProblem& prob, std::pair<RangedFn, RangedFn> initial) {
    ReconstructionResult res;
    RangedFn f1 = std::move(initial.first);
    RangedFn f2 = std::move(initial.second);
    res.initial_profiles = {f1.profile(), f2.profile()};

    const bool has_truth = prob.truth.has_value();
    auto unknown_error = [&](const RangedFn& f, int s) {
        return error_norm(f, (*prob.truth)[s], prob.ranges[s]);
    };
    if (has_truth) res.initial_error = {unknown_error(f1, 0), unknown_error(f2, 1)};

    // Monitored sequence: max relative error vs truth, or (without truth)
    // the relative successive-iterate distance.
    std::vector<double> monitored;
    if (has_truth) monitored.push_back(std::max(res.initial_error[0], res.initial_error[1]));

    int grow_streak = 0;
    bool stopped = false;
    for (int k = 1; k <= prob.max_iters && !stopped; ++k) {
        std::pair<RangedFn, RangedFn> next;
        try {
            if (prob.spec.is_phi_mode()) next = step_phi(f1, f2, prob, prob.mode);
            else if (prob.mode == MeasurementKind::FinalTime)
                next = step_f_finaltime(f1, f2, prob);
            else next = step_f_timetrace(f1, f2, prob);
        } catch (const ForwardFailure& fe) {
            res.verdict = fe.blow_up ? Verdict::BlowUp : Verdict::Diverged;
            res.failure_reason = fe.what();
            finalize_q(res, monitored, has_truth);
            return res;
        }

        IterateRecord rec;
        rec.profiles = {next.first.profile(), next.second.profile()};

        double m_k;
        if (has_truth) {
            std::array<double, 2> e = {unknown_error(next.first, 0),
                                       unknown_error(next.second, 1)};
            res.error_history.push_back(e);
            m_k = std::max(e[0], e[1]);
        } else {
            m_k = std::max(profile_distance(rec.profiles[0],
                                            res.iterates.empty()
                                                ? res.initial_profiles[0]
                                                : res.iterates.back().profiles[0]),
                           profile_distance(rec.profiles[1],
                                            res.iterates.empty()
                                                ? res.initial_profiles[1]
                                                : res.iterates.back().profiles[1]));
        }
        res.iterates.push_back(std::move(rec));

        if (!monitored.empty()) {
            const double prev = monitored.back();
            if (m_k > 1.001 * prev) {
                if (++grow_streak >= 2) {
                    monitored.push_back(m_k);
                    res.verdict = Verdict::Diverged;
                    res.failure_reason = "error grew over two consecutive iterations";
                    finalize_q(res, monitored, has_truth);
                    return res;
                }
            } else {
                grow_streak = 0;
            }
            if (std::abs(m_k - prev) < prob.stagnation_tol) stopped = true;
        }
        monitored.push_back(m_k);
        f1 = next.first;
        f2 = next.second;
    }

    finalize_q(res, monitored, has_truth);
    res.verdict = (res.contraction_q && *res.contraction_q < 1.0) ? Verdict::Converged
                                                                  : Verdict::Stagnated;
    return res;
}

ReconstructionResult run_from_zero(const InverseProblem& prob) {
    return run(prob, {RangedFn::zero(prob.ranges[0], prob.ncenters),
                      RangedFn::zero(prob.ranges[1], prob.ncenters)});
}

}  // namespace rdinv
