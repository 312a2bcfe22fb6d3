#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "rdinv/forward_solver.hpp"
#include "rdinv/smoothing.hpp"

namespace rdinv {

enum class Verdict { Converged, Stagnated, Diverged, BlowUp };

std::string verdict_name(Verdict v);

/// Everything a reconstruction needs: the system with its unknown slot, the
/// working grid, smoothed + raw data, per-unknown observable ranges, and
/// iteration controls. Truth functions (when known) drive error histories.
struct InverseProblem {
    SystemSpec spec;
    Grid grid;
    MeasurementKind mode = MeasurementKind::FinalTime;
    SmoothedData data;
    Measurement raw;
    std::array<RangeInterval, 2> ranges{};
    int max_iters = 12;
    double stagnation_tol = 1e-8;
    int ncenters = RangedFn::kDefaultCenters;
    double ridge = -1.0;
    std::optional<std::array<std::function<double(double)>, 2>> truth;
    SolverOptions solver;
};

/// Fills the observable ranges from the data extrema (per species for the
/// f-pair, composite w(data) for the phi-pair) and checks mode consistency.
InverseProblem make_problem(SystemSpec spec, Grid grid, MeasurementKind mode,
                            SmoothedData data, Measurement raw);

struct IterateRecord {
    std::array<StoredProfile, 2> profiles;
};

struct ReconstructionResult {
    std::array<StoredProfile, 2> initial_profiles;
    std::vector<IterateRecord> iterates;                 // after each update
    std::vector<std::array<double, 2>> error_history;    // per iteration, if truth given
    std::array<double, 2> initial_error{0.0, 0.0};
    Verdict verdict = Verdict::Stagnated;
    std::optional<double> contraction_q;
    std::string failure_reason;

    int iterations() const { return static_cast<int>(iterates.size()); }
};

/// One update of the f-pair from final-time data: solve forward with the
/// current iterates, difference the trajectory in time at T, subtract the
/// known terms on the dense data, and project onto univariate functions of
/// the data values by regularized least squares.
std::pair<RangedFn, RangedFn> step_f_finaltime(const RangedFn& f1, const RangedFn& f2,
                                               const InverseProblem& prob);

/// One update of the f-pair from boundary time-trace data; uses the
/// one-sided boundary Laplacian of the iterate solve instead of D_t u(T).
std::pair<RangedFn, RangedFn> step_f_timetrace(const RangedFn& f1, const RangedFn& f2,
                                               const InverseProblem& prob);

/// One update of the phi-pair (either data type); abscissae are the
/// composite values w(data), scaled by the interaction multipliers.
std::pair<RangedFn, RangedFn> step_phi(const RangedFn& p1, const RangedFn& p2,
                                       const InverseProblem& prob, MeasurementKind mode);

/// Runs the fixed-point iteration from the given initial pair, recording a
/// profile snapshot and (with truth) relative errors each iteration. Stops
/// on max_iters, stagnation, or divergence (two consecutive error increases
/// or a forward failure).
ReconstructionResult run(const InverseProblem& prob,
                         std::pair<RangedFn, RangedFn> initial);

/// run() from the zero pair on the data ranges.
ReconstructionResult run_from_zero(const InverseProblem& prob);

/// Relative discrete-L2 distance over the 100 stored abscissae of J;
/// falls back to the absolute norm when |truth| vanishes there.
double error_norm(const RangedFn& f, const std::function<double(double)>& truth,
                  const RangeInterval& J);

}  // namespace rdinv
