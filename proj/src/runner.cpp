#include "rdinv/runner.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "rdinv/csv.hpp"
#include "rdinv/svg_plot.hpp"

namespace rdinv {

namespace fs = std::filesystem;

namespace {

int default_sample_count(MeasurementKind mode) {
    return mode == MeasurementKind::FinalTime ? 20 : 25;
}

SmoothedData smooth_for_mode(const Measurement& meas, const BuiltExperiment& exp) {
    const SmoothingConfig& sc = exp.cfg.smoothing;
    if (!sc.enabled) return interpolate_raw(meas, exp.grid);
    if (exp.mode == MeasurementKind::FinalTime)
        return smooth_spatial(meas, sc.ncoef, sc.mu_spatial, exp.spec, exp.grid);
    const double x0 = meas.trace_point == Endpoint::Left ? 0.0 : exp.grid.length;
    std::array<double, 2> anchors = {exp.spec.initial[0] ? exp.spec.initial[0](x0) : 0.0,
                                     exp.spec.initial[1] ? exp.spec.initial[1](x0) : 0.0};
    return smooth_temporal(meas, sc.mu_temporal, anchors, exp.grid);
}

}  // namespace

InverseProblem prepare_problem(const BuiltExperiment& exp, std::optional<Measurement> loaded,
                               Trajectory* data_traj_out, Measurement* measurement_out) {
    Measurement meas;
    if (loaded) {
        meas = std::move(*loaded);
        if (meas.kind != exp.mode)
            throw ConfigError("loaded measurement kind does not match the configured mode");
    } else {
        Trajectory traj = solve_forward(exp.spec, exp.grid);
        const int S = exp.cfg.sampling.count > 0 ? exp.cfg.sampling.count
                                                 : default_sample_count(exp.mode);
        meas = sample_measurement(traj, exp.mode, S, exp.cfg.sampling.noise,
                                  exp.cfg.sampling.seed, exp.cfg.sampling.point);
        if (data_traj_out) *data_traj_out = std::move(traj);
    }
    if (measurement_out) *measurement_out = meas;

    SmoothedData smoothed = smooth_for_mode(meas, exp);
    InverseProblem prob =
        make_problem(exp.spec, exp.grid, exp.mode, std::move(smoothed), std::move(meas));
    prob.max_iters = exp.cfg.inversion.max_iters;
    prob.stagnation_tol = exp.cfg.inversion.stagnation_tol;
    prob.ncenters = exp.cfg.inversion.ncenters;
    prob.ridge = exp.cfg.inversion.ridge;
    if (exp.has_truth) prob.truth = exp.truth;
    return prob;
}

PipelineResult run_inversion_pipeline(const BuiltExperiment& exp,
                                      std::optional<Measurement> loaded) {
    PipelineResult r;
    r.problem = prepare_problem(exp, std::move(loaded), &r.data_trajectory, &r.measurement);
    r.smoothed = r.problem.data;
    r.margins = invertibility_margin(
        r.problem.data, exp.spec.is_phi_mode() ? &exp.spec.coupling : nullptr);
    r.reconstruction = run_from_zero(r.problem);
    return r;
}

int verdict_exit_code(const ReconstructionResult& rec) {
    switch (rec.verdict) {
        case Verdict::Converged:
        case Verdict::Stagnated: return kExitOk;
        case Verdict::Diverged: return kExitDiverged;
        case Verdict::BlowUp: return kExitForwardFailure;
    }
    return kExitOk;
}

namespace {

void write_profile_csv(const fs::path& path, const ReconstructionResult& rec, int unknown) {
    std::vector<double> iter_col, absc_col, val_col;
    auto push = [&](int iter, const StoredProfile& p) {
        for (size_t i = 0; i < p.abscissae.size(); ++i) {
            iter_col.push_back(iter);
            absc_col.push_back(p.abscissae[i]);
            val_col.push_back(p.values[i]);
        }
    };
    push(0, rec.initial_profiles[unknown]);
    for (int k = 0; k < rec.iterations(); ++k) push(k + 1, rec.iterates[k].profiles[unknown]);
    write_csv(path.string(), {"iter", "abscissa", "value"},
              {&iter_col, &absc_col, &val_col});
}

void write_recon_svg(const fs::path& path, const ReconstructionResult& rec,
                     const BuiltExperiment& exp, int unknown, const RangeInterval& J) {
    std::vector<PlotSeries> series;
    if (exp.has_truth) {
        PlotSeries truth;
        for (int i = 0; i < StoredProfile::kPoints; ++i) {
            const double xi = J.lo + J.width() * i / (StoredProfile::kPoints - 1);
            truth.x.push_back(xi);
            truth.y.push_back(exp.truth[unknown](xi));
        }
        truth.color = "#000000";
        truth.dashed = true;
        truth.label = "target";
        truth.width = 2.0;
        series.push_back(std::move(truth));
    }
    // Up to five snapshots in the figure palette, earliest first.
    const int n = rec.iterations();
    std::vector<int> picks;
    if (n <= 5)
        for (int k = 1; k <= n; ++k) picks.push_back(k);
    else
        for (int i = 0; i < 5; ++i) picks.push_back(1 + (n - 1) * i / 4);
    for (size_t i = 0; i < picks.size(); ++i) {
        const StoredProfile& p = rec.iterates[picks[i] - 1].profiles[unknown];
        PlotSeries s;
        s.x = p.abscissae;
        s.y = p.values;
        s.color = iterate_palette()[i % iterate_palette().size()];
        s.label = "iterate " + std::to_string(picks[i]);
        series.push_back(std::move(s));
    }
    PlotOptions opts;
    opts.title = std::string("reconstruction of ") +
                 (exp.spec.is_phi_mode() ? (unknown == 0 ? "phi1" : "phi2")
                                         : (unknown == 0 ? "f1" : "f2"));
    opts.xlabel = exp.spec.is_phi_mode() ? "w" : (unknown == 0 ? "u" : "v");
    opts.ylabel = "value";
    write_svg_plot(path.string(), series, opts);
}

nlohmann::json summary_json(const PipelineResult& r, const BuiltExperiment& exp) {
    nlohmann::json s;
    s["verdict"] = verdict_name(r.reconstruction.verdict);
    s["iterations"] = r.reconstruction.iterations();
    if (r.reconstruction.contraction_q) s["contraction_q"] = *r.reconstruction.contraction_q;
    if (!r.reconstruction.failure_reason.empty())
        s["failure_reason"] = r.reconstruction.failure_reason;
    if (!r.reconstruction.error_history.empty()) {
        const auto& last = r.reconstruction.error_history.back();
        s["final_error"] = {last[0], last[1]};
    }
    s["mode"] = exp.mode == MeasurementKind::FinalTime ? "final-time" : "time-trace";
    s["ranges"] = {{r.problem.ranges[0].lo, r.problem.ranges[0].hi},
                   {r.problem.ranges[1].lo, r.problem.ranges[1].hi}};
    s["invertibility_margin"] = {r.margins[0], r.margins[1]};
    s["samples"] = r.measurement.count();
    s["noise"] = r.measurement.noise_level;
    s["seed"] = r.measurement.seed;
    return s;
}

}  // namespace

void write_inversion_artifacts(const PipelineResult& r, const BuiltExperiment& exp,
                               const fs::path& dir, bool svg) {
    fs::create_directories(dir);
    const ReconstructionResult& rec = r.reconstruction;

    {
        std::vector<double> iter, e1, e2;
        if (exp.has_truth) {
            iter.push_back(0);
            e1.push_back(rec.initial_error[0]);
            e2.push_back(rec.initial_error[1]);
            for (size_t k = 0; k < rec.error_history.size(); ++k) {
                iter.push_back(static_cast<double>(k + 1));
                e1.push_back(rec.error_history[k][0]);
                e2.push_back(rec.error_history[k][1]);
            }
        }
        write_csv((dir / "error_history.csv").string(), {"iter", "err_f1", "err_f2"},
                  {&iter, &e1, &e2});
    }

    write_profile_csv(dir / "iterates_f1.csv", rec, 0);
    write_profile_csv(dir / "iterates_f2.csv", rec, 1);

    if (exp.has_truth) {
        for (int unknown = 0; unknown < 2; ++unknown) {
            std::vector<double> xs, ys;
            const RangeInterval& J = r.problem.ranges[unknown];
            for (int i = 0; i < StoredProfile::kPoints; ++i) {
                const double xi = J.lo + J.width() * i / (StoredProfile::kPoints - 1);
                xs.push_back(xi);
                ys.push_back(exp.truth[unknown](xi));
            }
            write_csv((dir / (unknown == 0 ? "truth_f1.csv" : "truth_f2.csv")).string(),
                      {"abscissa", "value"}, {&xs, &ys});
        }
    }

    {
        std::ofstream out(dir / "measurement.csv", std::ios::binary);
        write_measurement_csv(r.measurement, out);
    }
    {
        const SmoothedData& d = r.smoothed;
        std::vector<std::string> header = {"abscissa", "u", "v", "du", "dv"};
        std::vector<const std::vector<double>*> cols = {&d.abscissae, &d.values[0],
                                                        &d.values[1], &d.deriv[0],
                                                        &d.deriv[1]};
        if (!d.second[0].empty()) {
            header.insert(header.end(), {"d2u", "d2v"});
            cols.insert(cols.end(), {&d.second[0], &d.second[1]});
        }
        write_csv((dir / "smoothed.csv").string(), header, cols);
    }
    {
        std::ofstream out(dir / "summary.json", std::ios::binary);
        out << summary_json(r, exp).dump(2) << "\n";
    }

    if (svg) {
        write_recon_svg(dir / "recon_f1.svg", rec, exp, 0, r.problem.ranges[0]);
        write_recon_svg(dir / "recon_f2.svg", rec, exp, 1, r.problem.ranges[1]);
        if (exp.has_truth && !rec.error_history.empty()) {
            std::vector<PlotSeries> series(2);
            for (int s = 0; s < 2; ++s) {
                series[s].x.push_back(0);
                series[s].y.push_back(rec.initial_error[s]);
                for (size_t k = 0; k < rec.error_history.size(); ++k) {
                    series[s].x.push_back(static_cast<double>(k + 1));
                    series[s].y.push_back(rec.error_history[k][s]);
                }
                series[s].color = s == 0 ? "#1f77b4" : "#d62728";
                series[s].label = s == 0 ? "err f1" : "err f2";
            }
            PlotOptions opts;
            opts.title = "iteration errors";
            opts.xlabel = "iteration";
            opts.ylabel = "relative error";
            opts.log_y = true;
            write_svg_plot((dir / "errors.svg").string(), series, opts);
        }
    }
}

int cmd_forward(const ExperimentConfig& cfg, std::ostream& log) {
    const BuiltExperiment exp = build_experiment(cfg);
    Trajectory traj;
    try {
        traj = solve_forward(exp.spec, exp.grid);
    } catch (const std::exception& e) {
        log << "forward solve failed: " << e.what() << "\n";
        return kExitForwardFailure;
    }

    const fs::path dir(cfg.output.dir);
    fs::create_directories(dir);
    const Grid& g = exp.grid;
    std::vector<double> xs(g.nx);
    for (int j = 0; j < g.nx; ++j) xs[j] = g.x(j);

    std::vector<std::string> header = {"x"};
    std::vector<std::vector<double>> cols;
    const int snapshots[] = {0, (g.nt - 1) / 4, (g.nt - 1) / 2, 3 * (g.nt - 1) / 4, g.nt - 1};
    for (int k : snapshots) {
        for (int s = 0; s < 2; ++s) {
            std::vector<double> col(g.nx);
            for (int j = 0; j < g.nx; ++j) col[j] = traj.at(s, k, j);
            cols.push_back(std::move(col));
            char buf[48];
            std::snprintf(buf, sizeof buf, "%s_t%.6g", s == 0 ? "u" : "v", g.t(k));
            header.push_back(buf);
        }
    }
    std::vector<const std::vector<double>*> colptrs = {&xs};
    for (const auto& c : cols) colptrs.push_back(&c);
    write_csv((dir / "snapshots.csv").string(), header, colptrs);

    if (cfg.output.svg) {
        std::vector<PlotSeries> series;
        for (int s = 0; s < 2; ++s) {
            PlotSeries ps;
            ps.x = xs;
            ps.y.resize(g.nx);
            for (int j = 0; j < g.nx; ++j) ps.y[j] = traj.at(s, g.nt - 1, j);
            ps.color = s == 0 ? "#1f77b4" : "#d62728";
            ps.label = s == 0 ? "u(x,T)" : "v(x,T)";
            series.push_back(std::move(ps));
        }
        PlotOptions opts;
        opts.title = "final-time profiles";
        opts.xlabel = "x";
        opts.ylabel = "value";
        write_svg_plot((dir / "final_profiles.svg").string(), series, opts);
    }
    log << "forward: wrote " << (dir / "snapshots.csv").string() << "\n";
    return kExitOk;
}

int cmd_invert(const ExperimentConfig& cfg, std::ostream& log,
               const std::string& measurement_csv) {
    const BuiltExperiment exp = build_experiment(cfg);
    std::optional<Measurement> loaded;
    if (!measurement_csv.empty()) {
        std::ifstream in(measurement_csv);
        if (!in) throw ConfigError("cannot open measurement file '" + measurement_csv + "'");
        loaded = read_measurement_csv(in);
    }
    PipelineResult r;
    try {
        r = run_inversion_pipeline(exp, std::move(loaded));
    } catch (const BlowUp& e) {
        log << "data simulation failed: " << e.what() << "\n";
        return kExitForwardFailure;
    } catch (const NewtonDivergence& e) {
        log << "data simulation failed: " << e.what() << "\n";
        return kExitForwardFailure;
    }
    write_inversion_artifacts(r, exp, cfg.output.dir, cfg.output.svg);
    log << "invert: " << verdict_name(r.reconstruction.verdict) << " after "
        << r.reconstruction.iterations() << " iterations";
    if (!r.reconstruction.error_history.empty())
        log << ", final errors " << r.reconstruction.error_history.back()[0] << " / "
            << r.reconstruction.error_history.back()[1];
    log << "\n";
    return verdict_exit_code(r.reconstruction);
}

int cmd_sweep(const ExperimentConfig& cfg, const std::vector<double>& betas,
              std::ostream& log) {
    if (betas.empty()) throw ConfigError("sweep: empty beta list");
    const fs::path dir(cfg.output.dir);
    fs::create_directories(dir);

    struct SweepRun {
        double beta;
        PipelineResult result;
        std::string error;
        BuiltExperiment exp;
    };
    std::vector<SweepRun> runs(betas.size());

    std::mutex mu;
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= betas.size()) return;
            ExperimentConfig local = cfg;
            if (local.system.is_null()) local.system = nlohmann::json::object();
            const bool phi = local.system.contains("unknown")
                                 ? local.system["unknown"] == "phi-pair"
                                 : local.preset == "interaction-phi";
            if (phi) {
                local.system["beta_u"] = betas[i];
                local.system["beta_v"] = betas[i];
            } else {
                local.system["beta"] = betas[i];
            }
            SweepRun& run = runs[i];
            run.beta = betas[i];
            try {
                run.exp = build_experiment(local);
                run.result = run_inversion_pipeline(run.exp);
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                run.error = e.what();
            }
        }
    };
    const unsigned nthreads =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(betas.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Aggregate error histories.
    std::vector<double> beta_col, iter_col, e1_col, e2_col;
    std::vector<PlotSeries> rate_series;
    for (const SweepRun& run : runs) {
        if (!run.error.empty()) {
            log << "sweep beta=" << run.beta << ": failed: " << run.error << "\n";
            continue;
        }
        const ReconstructionResult& rec = run.result.reconstruction;
        PlotSeries ps;
        ps.label = "beta=" + std::to_string(run.beta).substr(0, 6);
        ps.color = iterate_palette()[(&run - runs.data()) % iterate_palette().size()];
        beta_col.push_back(run.beta);
        iter_col.push_back(0);
        e1_col.push_back(rec.initial_error[0]);
        e2_col.push_back(rec.initial_error[1]);
        ps.x.push_back(0);
        ps.y.push_back(std::max(rec.initial_error[0], rec.initial_error[1]));
        for (size_t k = 0; k < rec.error_history.size(); ++k) {
            beta_col.push_back(run.beta);
            iter_col.push_back(static_cast<double>(k + 1));
            e1_col.push_back(rec.error_history[k][0]);
            e2_col.push_back(rec.error_history[k][1]);
            ps.x.push_back(static_cast<double>(k + 1));
            ps.y.push_back(std::max(rec.error_history[k][0], rec.error_history[k][1]));
        }
        rate_series.push_back(std::move(ps));
        write_inversion_artifacts(run.result, run.exp,
                                  dir / ("beta_" + std::to_string(run.beta)), cfg.output.svg);
        log << "sweep beta=" << run.beta << ": " << verdict_name(rec.verdict) << "\n";
    }
    write_csv((dir / "sweep_errors.csv").string(), {"beta", "iter", "err_f1", "err_f2"},
              {&beta_col, &iter_col, &e1_col, &e2_col});
    if (cfg.output.svg && !rate_series.empty()) {
        PlotOptions opts;
        opts.title = "convergence rates vs beta";
        opts.xlabel = "iteration";
        opts.ylabel = "max relative error";
        opts.log_y = true;
        write_svg_plot((dir / "sweep_rates.svg").string(), rate_series, opts);
    }
    return kExitOk;
}

int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log) {
    const BuiltExperiment exp = build_experiment(cfg);
    const fs::path dir(cfg.output.dir);
    fs::create_directories(dir);

    Trajectory traj;
    try {
        traj = solve_forward(exp.spec, exp.grid);
    } catch (const std::exception& e) {
        log << "forward solve failed: " << e.what() << "\n";
        return kExitForwardFailure;
    }

    std::ofstream report(dir / "diagnose.txt", std::ios::binary);
    report << "system diagnostics\n==================\n";

    const DecayFit fit = decay_fit(traj);
    report << "decay fit: |D_t u| ~ C2 exp(-c2 t) with C2 = " << fit.C2
           << ", c2 = " << fit.c2 << " (log-fit rms " << fit.residual << ")\n";

    // Observed state ranges drive the sample boxes.
    RangeInterval Iu(traj.values[0][0], traj.values[0][0] + 1.0);
    RangeInterval Iv = Iu;
    {
        double lo0 = traj.values[0][0], hi0 = lo0, lo1 = traj.values[1][0], hi1 = lo1;
        for (double y : traj.values[0]) { lo0 = std::min(lo0, y); hi0 = std::max(hi0, y); }
        for (double y : traj.values[1]) { lo1 = std::min(lo1, y); hi1 = std::max(hi1, y); }
        Iu = RangeInterval(lo0, hi0 + (hi0 - lo0 < 1e-9 ? 1e-9 : 0.0));
        Iv = RangeInterval(lo1, hi1 + (hi1 - lo1 < 1e-9 ? 1e-9 : 0.0));
    }
    report << "state ranges: u in [" << Iu.lo << ", " << Iu.hi << "], v in [" << Iv.lo
           << ", " << Iv.hi << "]\n";

    const DissipativityReport diss = dissipativity_check(exp.spec, Iu, Iv, 0.0, 41);
    report << "dissipativity (-M nonnegative definite): "
           << (diss.holds ? "holds" : "violated") << ", worst margin " << diss.worst_margin
           << " at (u,v) = (" << diss.worst_u << ", " << diss.worst_v << ")\n";
    {
        std::vector<double> ucol, vcol, mcol;
        for (int i = 0; i < diss.nsamples; ++i)
            for (int j = 0; j < diss.nsamples; ++j) {
                ucol.push_back(Iu.lo + Iu.width() * i / (diss.nsamples - 1));
                vcol.push_back(Iv.lo + Iv.width() * j / (diss.nsamples - 1));
                mcol.push_back(diss.margin_grid[static_cast<size_t>(i) * diss.nsamples + j]);
            }
        write_csv((dir / "dissipativity_margins.csv").string(), {"u", "v", "margin"},
                  {&ucol, &vcol, &mcol});
    }

    if (const FPair* fp = std::get_if<FPair>(&exp.spec.unknown)) {
        try {
            const double bound =
                competing_beta_bound(fp->f1, fp->f2, Iu, Iv, 4096);
            report << "competing-species coupling bound: |beta| <= " << bound
                   << " (configured beta = " << fp->beta << ")\n";
        } catch (const NotDissipative& e) {
            report << "competing-species coupling bound: not applicable (" << e.what()
                   << ")\n";
        }
    }

    {
        const Measurement meas = sample_measurement(
            traj, exp.mode,
            exp.cfg.sampling.count > 0 ? exp.cfg.sampling.count : default_sample_count(exp.mode),
            0.0, exp.cfg.sampling.seed, exp.cfg.sampling.point);
        SmoothedData smoothed = smooth_for_mode(meas, exp);
        const RangeInterval Ju = estimate_range(smoothed, 0);
        const RangeInterval Jv = estimate_range(smoothed, 1);
        const RangeConditionReport range = range_condition_check(traj, Ju, Jv);
        report << "range condition vs noise-free data: "
               << (range.holds() ? "holds" : "violated") << "\n";
        for (int s = 0; s < 2; ++s)
            report << "  species " << (s == 0 ? "u" : "v") << ": violation fraction "
                   << range.violation_fraction[s] << ", max excursion "
                   << range.max_excursion[s] << "\n";
    }

    log << "diagnose: wrote " << (dir / "diagnose.txt").string() << "\n";
    return kExitOk;
}

}  // namespace rdinv
