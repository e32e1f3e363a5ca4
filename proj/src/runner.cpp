#include "qkin/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "qkin/analytic.hpp"
#include "qkin/classical.hpp"
#include "qkin/errors.hpp"
#include "qkin/snapshot_io.hpp"

namespace qkin {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

DensityMatrixGrid build_initial_state(const RunConfig& cfg) {
    const auto& is = cfg.initial_state;
    const auto& g = cfg.grid;
    const auto& p = *cfg.physical;
    if (is.type == "thermal-gaussian")
        return DensityMatrixGrid::gaussian_mixed(g.nr, g.ns, g.r_extent, g.s_extent,
                                                 is.center, is.sigma_q, is.momentum,
                                                 is.sigma_p, p.hbar);
    return DensityMatrixGrid::gaussian_pure(g.nr, g.ns, g.r_extent, g.s_extent, is.center,
                                            is.sigma_q, is.momentum, p.hbar);
}

SnapshotMeta meta_of(const RunConfig& cfg) {
    SnapshotMeta m;
    m.config_hash = cfg.config_hash;
    m.seed = cfg.seed;
    return m;
}

json cumulant_json(const std::vector<CumulantEstimate>& v) {
    json out = json::array();
    for (const auto& c : v) out.push_back({{"value", c.value}, {"error_bound", c.error_bound}});
    return out;
}

json fit_json(const PowerLawFit& f) {
    return {{"exponent", f.exponent},
            {"exponent_err", f.exponent_err},
            {"prefactor", f.prefactor},
            {"prefactor_err", f.prefactor_err},
            {"t_lo", f.t_lo},
            {"t_hi", f.t_hi},
            {"n_points", f.n_points},
            {"r_squared", f.r_squared}};
}

// Cumulant series plus optional tail diagnostics over a snapshot sequence.
CumulantSeries analyze_snapshots(const std::vector<DensityMatrixGrid>& snaps,
                                 const PhysicalParams& p, const ObservablesConfig& obs) {
    CumulantSeries series;
    for (const auto& grid : snaps) {
        const auto qc = coordinate_cumulants(grid, p, obs.max_order);
        const auto pc = momentum_cumulants(grid, p, std::min(obs.max_order, 8));
        series.append(grid.time_stamp, qc, pc);
    }
    if (obs.fit_t_hi > obs.fit_t_lo) {
        series.q2_fit = fit_diffusion_exponent(series.times, series.series('Q', 2),
                                               obs.fit_t_lo, obs.fit_t_hi);
    }
    return series;
}

json equilibrium_report(const CumulantSeries& series, const PhysicalParams& p) {
    // Convergence over the final time decade: mean and drift of <<P^2>>,
    // plus the adjudication values MT, 2MT and the n=2 formula for <<P^4>>.
    const auto& t = series.times;
    const auto& p2 = series.series('P', 2);
    const double t_hi = t.back();
    const double t_lo = t_hi / 10.0;
    double mean = 0.0, first = 0.0, last = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo) continue;
        if (n == 0) first = p2[i];
        last = p2[i];
        mean += p2[i];
        ++n;
    }
    json rep;
    if (n >= 2) {
        mean /= n;
        rep["p2_mean_final_decade"] = mean;
        rep["p2_relative_drift_final_decade"] = std::abs(last - first) / std::abs(mean);
        rep["p2_over_MT"] = mean / (p.mass * p.temperature);
    }
    rep["MT"] = p.mass * p.temperature;
    rep["2MT_quoted"] = equilibrium_p2(p);
    rep["MT_formula_n1"] = equilibrium_p2_formula_n1(p);
    rep["p4_formula_n2"] = momentum_cumulant_formula(2, p);
    if (series.cumulants.count({'P', 4})) {
        const auto& p4 = series.series('P', 4);
        rep["p4_final"] = p4.back();
    }
    return rep;
}

json tail_report(const DensityMatrixGrid& grid, const PhysicalParams& p) {
    json rep;
    const std::vector<double> quantiles = {1e-2, 1e-3, 1e-4};
    rep["quantiles"] = quantiles;
    rep["coordinate_exceedance_ratios"] =
        tail_exceedance_ratios([&] {
            std::vector<double> r(grid.nr());
            for (int i = 0; i < grid.nr(); ++i) r[i] = grid.r_at(i);
            return r;
        }(), grid.diagonal(), grid.dr(), quantiles);

    const auto marginal = momentum_marginal(grid, p);
    try {
        const auto ti = stable_tail_index(marginal, p);
        rep["momentum_tail_index"] = {{"alpha", ti.alpha}, {"alpha_err", ti.alpha_err}};
    } catch (const std::exception& e) {
        rep["momentum_tail_index"] = {{"error", e.what()}};
    }
    try {
        // Coordinate marginal treated through the same estimator.
        MomentumMarginal coord;
        coord.p.resize(grid.nr());
        coord.density = grid.diagonal();
        for (int i = 0; i < grid.nr(); ++i) coord.p[i] = grid.r_at(i);
        const auto ti = stable_tail_index(coord, p);
        rep["coordinate_tail_index"] = {{"alpha", ti.alpha}, {"alpha_err", ti.alpha_err}};
    } catch (const std::exception& e) {
        rep["coordinate_tail_index"] = {{"error", e.what()}};
    }
    return rep;
}

void write_snapshots(const fs::path& dir, const std::vector<DensityMatrixGrid>& snaps,
                     const SnapshotMeta& meta) {
    int idx = 0;
    for (const auto& g : snaps) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%04d.qrho", idx++);
        write_snapshot(dir / name, g, meta);
    }
}

void write_conservation_log(const fs::path& path, const Trajectory& traj,
                            const SnapshotMeta& meta) {
    TableWriter tw(path, meta,
                   {"step", "time", "trace_defect", "hermiticity_defect", "min_diagonal",
                    "min_eigenvalue"});
    for (const auto& r : traj.conservation_log)
        tw.row({static_cast<double>(r.step), r.time, r.trace_defect, r.hermiticity_defect,
                r.min_diagonal, r.min_eigenvalue});
}

json run_evolve_job(const RunConfig& cfg, const fs::path& out, bool emit, json& summary) {
    const auto& p = *cfg.physical;
    const auto rho0 = build_initial_state(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    Trajectory traj = evolve(rho0, p, *cfg.correlator, *cfg.potential, cfg.solver);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    traj.provenance = cfg.echo;

    const SnapshotMeta meta = meta_of(cfg);
    if (emit && cfg.observables.emit_snapshots) write_snapshots(out, traj.snapshots, meta);
    if (emit) write_conservation_log(out / "conservation.txt", traj, meta);

    double max_trace = 0.0, max_herm = 0.0, min_diag = 0.0, min_eig = 0.0;
    bool has_eig = false;
    for (const auto& r : traj.conservation_log) {
        max_trace = std::max(max_trace, r.trace_defect);
        max_herm = std::max(max_herm, r.hermiticity_defect);
        min_diag = std::min(min_diag, r.min_diagonal);
        if (std::isfinite(r.min_eigenvalue)) {
            min_eig = has_eig ? std::min(min_eig, r.min_eigenvalue) : r.min_eigenvalue;
            has_eig = true;
        }
    }

    summary["status"] = traj.status == RunStatus::Completed          ? "completed"
                        : traj.status == RunStatus::EarlyStopTrace   ? "early-stop-trace"
                                                                     : "aborted-non-finite";
    summary["message"] = traj.message;
    summary["runtime_seconds"] = elapsed;
    summary["monitors"] = {{"max_trace_defect", max_trace},
                           {"max_hermiticity_defect", max_herm},
                           {"min_diagonal", min_diag}};
    if (has_eig) summary["monitors"]["min_coarse_eigenvalue"] = min_eig;

    const auto series = analyze_snapshots(traj.snapshots, p, cfg.observables);
    if (emit) emit_cumulant_table(out / "cumulants.txt", series, cfg.config_hash, cfg.seed);
    if (series.q2_fit) summary["q2_fit"] = fit_json(*series.q2_fit);
    if (emit && series.q2_fit)
        emit_fit_summary(out / "fit_summary.txt", *series.q2_fit, cfg.config_hash, cfg.seed);
    summary["equilibrium"] = equilibrium_report(series, p);
    if (cfg.observables.tail_diagnostics)
        summary["tails"] = tail_report(traj.final_state(), p);
    if (emit && cfg.observables.emit_wigner_slice) {
        const auto w = wigner_transform(traj.final_state(), p);
        emit_wigner_slice(out / "wigner_slice.txt", w, cfg.config_hash, cfg.seed);
    }
    summary["final_time"] = traj.final_state().time_stamp;
    return summary["status"] == "completed" ? json(0) : json(3);
}

json run_analytic_job(const RunConfig& cfg, const fs::path& out, json& summary) {
    const auto& p = *cfg.physical;
    const auto rho0 = build_initial_state(cfg);
    const SnapshotMeta meta = meta_of(cfg);

    std::vector<DensityMatrixGrid> snaps;
    snaps.push_back(rho0);
    for (double t : cfg.observables.snapshot_times) {
        snaps.push_back(cfg.job == JobKind::FreeAnalytic
                            ? free_propagate(rho0, p, *cfg.correlator, t)
                            : decoherence_limit(rho0, p, *cfg.correlator, t));
    }
    if (cfg.observables.emit_snapshots) write_snapshots(out, snaps, meta);

    const auto series = analyze_snapshots(snaps, p, cfg.observables);
    emit_cumulant_table(out / "cumulants.txt", series, cfg.config_hash, cfg.seed);
    if (series.q2_fit) summary["q2_fit"] = fit_json(*series.q2_fit);

    const auto marginal = momentum_marginal(snaps.back(), p);
    emit_distribution(out / "momentum_marginal.txt", marginal.p, marginal.density,
                      cfg.config_hash, cfg.seed);
    if (cfg.observables.tail_diagnostics) summary["tails"] = tail_report(snaps.back(), p);
    summary["status"] = "completed";
    summary["final_time"] = snaps.back().time_stamp;
    summary["max_safe_time"] = free_propagate_max_time(rho0, p);
    return json(0);
}

json run_langevin_job(const RunConfig& cfg, const fs::path& out, json& summary) {
    const auto& p = *cfg.physical;
    const auto& lc = cfg.langevin;
    const auto coeffs = classical_coefficients(p);
    const double p_sigma = lc.p_sigma > 0.0 ? lc.p_sigma
                                            : std::sqrt(p.mass * p.temperature);
    auto ens = langevin_init(lc.n_walkers, cfg.seed, lc.q_mean, lc.q_sigma, lc.p_mean,
                             p_sigma);

    const SnapshotMeta meta = meta_of(cfg);
    TableWriter tw(out / "moments.txt", meta,
                   {"time", "q_mean", "q_var", "q_kappa3", "q_kappa4", "p_mean", "p_var",
                    "p_kappa3", "p_kappa4"});
    std::vector<double> times, q_var;
    auto record = [&]() {
        const auto m = ensemble_moments(ens);
        tw.row({m.time, m.q_mean, m.q_var, m.q_kappa3, m.q_kappa4, m.p_mean, m.p_var,
                m.p_kappa3, m.p_kappa4});
        times.push_back(m.time);
        q_var.push_back(m.q_var);
    };
    record();
    for (int step = 1; step <= lc.n_steps; ++step) {
        langevin_step(ens, coeffs, *cfg.potential, p, lc.dt);
        if (step % lc.record_stride == 0 || step == lc.n_steps) record();
    }

    summary["coefficients"] = {{"gamma", coeffs.gamma},
                               {"d_qq", coeffs.d_qq},
                               {"d_pp", coeffs.d_pp},
                               {"einstein_identity",
                                p.mass * p.beta() * coeffs.gamma * coeffs.d_qq}};
    const auto m = ensemble_moments(ens);
    summary["final_moments"] = {{"time", m.time},   {"q_mean", m.q_mean},
                                {"q_var", m.q_var}, {"p_mean", m.p_mean},
                                {"p_var", m.p_var}, {"p_kappa4", m.p_kappa4}};
    if (cfg.observables.fit_t_hi > cfg.observables.fit_t_lo) {
        const auto fit = fit_diffusion_exponent(times, q_var, cfg.observables.fit_t_lo,
                                                cfg.observables.fit_t_hi);
        summary["q2_fit"] = fit_json(fit);
        emit_fit_summary(out / "fit_summary.txt", fit, cfg.config_hash, cfg.seed);
    }
    summary["status"] = "completed";
    return json(0);
}

json run_rmt_job(const RunConfig& cfg, const fs::path& out, json& summary, bool verbose) {
    const auto& rc = *cfg.rmt;
    const auto report = run_covariance_audit(rc.ensemble, rc.n_samples, cfg.seed, rc.audit);

    std::ofstream rep(out / "covariance_report.txt");
    rep << "# config_hash=" << std::hex << cfg.config_hash << std::dec
        << " seed=" << cfg.seed << "\n";
    rep << report.summary();
    rep << "# k l m n xi xj structural theory empirical std_err z\n";
    for (const auto& e : report.entries)
        rep << e.k << " " << e.l << " " << e.m << " " << e.n << " " << e.xi << " " << e.xj
            << " " << (e.structural_zero ? 1 : 0) << " " << e.theory << " " << e.empirical
            << " " << e.std_err << " " << e.z << "\n";

    if (rc.export_first_sample) {
        const auto sample = sample_bath(rc.ensemble, cfg.seed, 0);
        write_bath_sample(out / "bath_sample_0000.qbath", sample, rc.ensemble.symmetry,
                          meta_of(cfg));
    }

    summary["status"] = report.passed ? "passed" : "failed";
    summary["n_samples"] = report.n_samples;
    summary["law_within_3se_fraction"] = report.law_within_3se_fraction;
    summary["max_abs_z_structural"] = report.max_abs_z_structural;
    summary["wide_band_indicator"] = report.wide_band_indicator;
    summary["wide_band_warning"] = report.wide_band_warning;
    if (verbose) std::cerr << report.summary();
    return report.passed ? json(0) : json(4);
}

json run_compare_job(const RunConfig& cfg, const fs::path& out, json& summary) {
    const auto& p = *cfg.physical;
    const auto rho0 = build_initial_state(cfg);
    const SnapshotMeta meta = meta_of(cfg);

    Trajectory traj = evolve(rho0, p, *cfg.correlator, *cfg.potential, cfg.solver);
    if (traj.status != RunStatus::Completed) {
        summary["status"] = "evolver-failed";
        summary["message"] = traj.message;
        return json(3);
    }
    write_conservation_log(out / "conservation.txt", traj, meta);

    // L-inf discrepancy between the evolver and the analytic free-motion
    // solution at every snapshot time.
    json discrepancies = json::array();
    double worst = 0.0;
    for (const auto& snap : traj.snapshots) {
        const double t = snap.time_stamp - rho0.time_stamp;
        const auto ana = free_propagate(rho0, p, *cfg.correlator, t);
        const double d = linf_distance(snap, ana);
        worst = std::max(worst, d);
        discrepancies.push_back({{"time", snap.time_stamp}, {"linf", d}});
    }
    summary["evolver_vs_analytic"] = discrepancies;
    summary["linf_max"] = worst;

    // Residual of the analytic solution in the full equation and in the
    // frictionless reduction, at the midpoint of the run.
    const double t_mid = 0.5 * (traj.final_state().time_stamp - rho0.time_stamp);
    const double h = cfg.solver.dt;
    std::vector<DensityMatrixGrid> trio;
    for (int i = -1; i <= 1; ++i)
        trio.push_back(free_propagate(rho0, p, *cfg.correlator, t_mid + i * h));
    summary["analytic_residual_full"] =
        residual_norm(trio, p, *cfg.correlator, *cfg.potential, true, true);
    summary["analytic_residual_frictionless"] =
        residual_norm(trio, p, *cfg.correlator, *cfg.potential, true, false);

    summary["status"] = "completed";
    return json(0);
}

}  // namespace

void emit_cumulant_table(const fs::path& path, const CumulantSeries& series,
                         std::uint64_t config_hash, std::uint64_t seed) {
    SnapshotMeta meta;
    meta.config_hash = config_hash;
    meta.seed = seed;
    std::vector<std::string> cols = {"time"};
    for (const auto& [key, _] : series.cumulants)
        cols.push_back(std::string(1, key.variable) + std::to_string(key.order));
    TableWriter tw(path, meta, cols);
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        std::vector<double> row = {series.times[i]};
        for (const auto& [_, vals] : series.cumulants) row.push_back(vals[i]);
        tw.row(row);
    }
}

void emit_wigner_slice(const fs::path& path, const WignerGrid& w, std::uint64_t config_hash,
                       std::uint64_t seed) {
    SnapshotMeta meta;
    meta.config_hash = config_hash;
    meta.seed = seed;
    TableWriter tw(path, meta, {"r", "p", "W"});
    for (int ir = 0; ir < w.nr; ++ir)
        for (int ip = 0; ip < w.np; ++ip) tw.row({w.r_at(ir), w.p_at(ip), w.at(ir, ip)});
}

void emit_fit_summary(const fs::path& path, const PowerLawFit& fit, std::uint64_t config_hash,
                      std::uint64_t seed) {
    SnapshotMeta meta;
    meta.config_hash = config_hash;
    meta.seed = seed;
    TableWriter tw(path, meta,
                   {"exponent", "exponent_err", "prefactor", "prefactor_err", "t_lo", "t_hi",
                    "n_points", "r_squared"});
    tw.row({fit.exponent, fit.exponent_err, fit.prefactor, fit.prefactor_err, fit.t_lo,
            fit.t_hi, static_cast<double>(fit.n_points), fit.r_squared});
}

void emit_distribution(const fs::path& path, const std::vector<double>& x,
                       const std::vector<double>& f, std::uint64_t config_hash,
                       std::uint64_t seed) {
    SnapshotMeta meta;
    meta.config_hash = config_hash;
    meta.seed = seed;
    TableWriter tw(path, meta, {"x", "f"});
    for (std::size_t i = 0; i < x.size(); ++i) tw.row({x[i], f[i]});
}

RunResult run(const RunConfig& cfg, bool verbose) {
    RunResult result;
    const fs::path out(cfg.output_dir);
    fs::create_directories(out);

    json summary;
    summary["job"] = to_string(cfg.job);
    summary["seed"] = cfg.seed;
    summary["config_hash"] = cfg.config_hash;
    summary["config"] = json::parse(cfg.echo);

    json code;
    try {
        switch (cfg.job) {
            case JobKind::Evolve:
                code = run_evolve_job(cfg, out, true, summary);
                break;
            case JobKind::FreeAnalytic:
            case JobKind::Decoherence:
                code = run_analytic_job(cfg, out, summary);
                break;
            case JobKind::Langevin:
                code = run_langevin_job(cfg, out, summary);
                break;
            case JobKind::RmtVerify:
                code = run_rmt_job(cfg, out, summary, verbose);
                break;
            case JobKind::Compare:
                code = run_compare_job(cfg, out, summary);
                break;
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        summary["status"] = "error";
        summary["message"] = e.what();
        code = json(3);
        if (verbose) std::cerr << "job failed: " << e.what() << "\n";
    }

    result.exit_code = code.get<int>();
    result.summary = summary;
    result.summary_path = out / "summary.json";
    std::ofstream os(result.summary_path);
    os << summary.dump(2) << "\n";
    return result;
}

}  // namespace qkin
