#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qreduce/csv.hpp"
#include "qreduce/diffusion.hpp"
#include "qreduce/errors.hpp"
#include "qreduce/estimators.hpp"
#include "qreduce/fokker_planck.hpp"
#include "qreduce/mixture.hpp"
#include "qreduce/quantum.hpp"
#include "qreduce/scenario.hpp"
#include "qreduce/wkb.hpp"

namespace qreduce {

struct RunOptions {
    std::filesystem::path out_dir = "out";
    unsigned threads = 1;
    bool write_csv = true;
    bool write_summary = true;
};

struct RunOutcome {
    nlohmann::json summary;
    bool passed = true; // every declared tolerance in the scenario held
    std::vector<std::string> files_written;
};

namespace detail {

using nlohmann::json;

struct CheckList {
    json checks = json::array();
    bool passed = true;

    void add(const std::string& name, double value, double target, double tolerance) {
        const bool ok = std::abs(value - target) <= tolerance;
        checks.push_back({{"name", name},
                          {"value", value},
                          {"target", target},
                          {"tolerance", tolerance},
                          {"passed", ok}});
        passed = passed && ok;
    }
};

inline json report_to_json(const BornReport& rep) {
    return {{"n_trajectories", rep.n_trajectories},
            {"n_completed", rep.n_completed},
            {"n_timeouts", rep.n_timeouts},
            {"frequencies", rep.frequencies},
            {"standard_errors", rep.standard_errors},
            {"mean_hitting_time", rep.mean_hitting_time},
            {"hitting_time_stddev", rep.hitting_time_stddev}};
}

inline PathSeries quantum_norm_series(const QuantumScenario& q, EvolveResult* full = nullptr) {
    TwoChannelState state = init_state(q.c1, q.c2, q.packet, q.grid);
    EvolveResult result =
        evolve(state, q.coupling, q.grid, q.dt, q.n_steps, q.record_every, false);
    PathSeries series = result.series;
    if (full) *full = std::move(result);
    return series;
}

} // namespace detail

/// Executes a parsed scenario: writes CSV series and a machine-readable
/// summary under opt.out_dir, and evaluates every tolerance the scenario
/// declares. Outputs depend only on (scenario, seed), never on thread count.
inline RunOutcome run_scenario(const Scenario& sc, const RunOptions& opt) {
    namespace fs = std::filesystem;
    using nlohmann::json;

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + opt.out_dir.string());

    RunOutcome outcome;
    json& summary = outcome.summary;
    summary["schema"] = "qreduce-summary/1";
    summary["kind"] = to_string(sc.kind);
    summary["seed"] = sc.seed;
    summary["scenario"] = sc.raw;

    detail::CheckList checks;
    json results;

    auto csv_path = [&](const std::string& name) {
        outcome.files_written.push_back(name);
        return opt.out_dir / name;
    };

    switch (sc.kind) {
    case ScenarioKind::diffusion: {
        const auto& d = std::get<DiffusionScenario>(sc.body);
        EnsembleResult ens = run_ensemble(d.p0, d.model, d.n_trajectories, d.dt, d.t_max,
                                          sc.seed, opt.threads, d.control);
        if (opt.write_csv)
            write_trajectories_csv(csv_path("trajectories.csv"), ens.records);
        results = detail::report_to_json(ens.report);
        if (d.expect) {
            if (d.expect->frequencies) {
                const auto& want = *d.expect->frequencies;
                const double m = double(std::max<std::size_t>(ens.report.n_completed, 1));
                for (std::size_t j = 0; j < want.size(); ++j) {
                    const double se = std::sqrt(want[j] * (1.0 - want[j]) / m);
                    checks.add("frequency_channel_" + std::to_string(j + 1),
                               ens.report.frequencies[j], want[j],
                               d.expect->n_sigma * se);
                }
            }
            if (d.expect->mean_hitting_time) {
                const double want = *d.expect->mean_hitting_time;
                checks.add("mean_hitting_time", ens.report.mean_hitting_time, want,
                           d.expect->rel_tol * std::abs(want));
            }
        }
        break;
    }
    case ScenarioKind::fokker_planck: {
        const auto& f = std::get<FpScenario>(sc.body);
        const FpGrid grid = FpGrid::validated(f.n_cells, f.a / 2.0);
        const FpSolution sol = solve(grid, f.x0, f.t_end, f.dt, f.scheme, f.record_every);
        if (opt.write_csv) {
            write_fp_density_csv(csv_path("density.csv"), grid, sol);
            write_fp_absorbed_csv(csv_path("absorbed.csv"), sol);
        }
        double max_conservation_error = 0.0;
        for (std::size_t i = 0; i < sol.times.size(); ++i) {
            const double total = sol.interior_mass_history[i] +
                                 sol.absorbed_mass_0_history[i] +
                                 sol.absorbed_mass_1_history[i];
            max_conservation_error =
                std::max(max_conservation_error, std::abs(total - 1.0));
        }
        const TridiagonalGenerator gen = build_generator(grid);
        const double lambda1 = smallest_eigenvalue(gen);
        results = {{"n_cells", grid.n_cells},
                   {"diffusion_coefficient", grid.diffusion_coefficient},
                   {"x0_effective", sol.x0_effective},
                   {"absorbed_mass_0", sol.absorbed_mass_0()},
                   {"absorbed_mass_1", sol.absorbed_mass_1()},
                   {"final_interior_mass", sol.final_interior_mass()},
                   {"max_conservation_error", max_conservation_error},
                   {"clamped_cells", sol.clamped_cells}};
        // Two rate notions reported side by side: the inverse spectral gap
        // approximates the mean absorption time but does not equal it.
        json spectral = {{"smallest_eigenvalue", lambda1},
                         {"inverse_smallest_eigenvalue", 1.0 / lambda1},
                         {"exact_mean_hitting_time", f.x0 * (1.0 - f.x0) / f.a}};
        try {
            spectral["survival_decay_rate"] = survival_decay_rate(sol);
        } catch (const InsufficientDecay& e) {
            spectral["survival_decay_rate"] = nullptr;
            spectral["note"] = e.what();
        }
        results["spectral"] = spectral;
        if (f.expect && f.expect->absorbed) {
            checks.add("absorbed_mass_0", sol.absorbed_mass_0(), (*f.expect->absorbed)[0],
                       f.expect->tol);
            checks.add("absorbed_mass_1", sol.absorbed_mass_1(), (*f.expect->absorbed)[1],
                       f.expect->tol);
        }
        break;
    }
    case ScenarioKind::quantum: {
        const auto& q = std::get<QuantumScenario>(sc.body);
        TwoChannelState state = init_state(q.c1, q.c2, q.packet, q.grid);
        EvolveResult result =
            evolve(state, q.coupling, q.grid, q.dt, q.n_steps, q.record_every, q.snapshots);
        if (opt.write_csv) {
            write_norm_series_csv(csv_path("norms.csv"), result);
            if (q.snapshots) {
                for (std::size_t s = 0; s < result.snapshots.size(); ++s) {
                    char name[32];
                    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", s);
                    write_snapshot_csv(csv_path(name), q.grid, result.snapshots[s]);
                }
            }
        }
        const std::size_t last = result.series.n_samples() - 1;
        double max_drift = 0.0;
        for (double total : result.total_norm)
            max_drift = std::max(max_drift, std::abs(total - result.total_norm.front()));
        results = {{"p1_initial", result.series.at(0, 0)},
                   {"p2_initial", result.series.at(0, 1)},
                   {"p1_final", result.series.at(last, 0)},
                   {"p2_final", result.series.at(last, 1)},
                   {"max_norm_drift", max_drift},
                   {"max_edge_amplitude", result.max_edge_amplitude},
                   {"edge_flagged", result.edge_flagged}};
        if (q.wkb) {
            double max_amp = 0.0;
            for (const auto& c : state.phi1()) max_amp = std::max(max_amp, std::abs(c));
            for (const auto& c : state.phi2()) max_amp = std::max(max_amp, std::abs(c));
            const auto reports = wkb_diagnostic(state, q.coupling, q.grid,
                                                q.wkb->threshold_rel * max_amp,
                                                q.wkb->fd_dt);
            json wkb = json::array();
            for (const auto& r : reports)
                wkb.push_back({{"source_l2", r.source_l2},
                               {"transport_source_l2", r.transport_source_l2},
                               {"transport_l2", r.transport_l2},
                               {"breaking_ratio", r.breaking_ratio},
                               {"masked_points", r.masked_points}});
            results["wkb"] = wkb;
        }
        if (q.expect) {
            if (q.expect->pointer_tol) {
                double max_dev = 0.0;
                for (std::size_t i = 0; i < result.series.n_samples(); ++i)
                    for (std::size_t j = 0; j < 2; ++j)
                        max_dev = std::max(max_dev, std::abs(result.series.at(i, j) -
                                                             result.series.at(0, j)));
                checks.add("pointer_norm_invariance", max_dev, 0.0, *q.expect->pointer_tol);
            }
            if (q.expect->rabi_tol) {
                const double lambda = q.coupling.lambda_x.offset;
                double max_err = 0.0;
                for (std::size_t i = 0; i < result.series.n_samples(); ++i) {
                    const double t = result.series.time(i);
                    max_err = std::max(max_err,
                                       std::abs(result.series.at(i, 0) -
                                                rabi_p1(q.c1, q.c2, lambda, q.grid.hbar, t)));
                }
                checks.add("rabi_closed_form", max_err, 0.0, *q.expect->rabi_tol);
            }
        }
        break;
    }
    case ScenarioKind::mixture: {
        const auto& m = std::get<MixtureScenario>(sc.body);
        std::vector<MixtureEnsemble::Component> components;
        for (std::size_t i = 0; i < m.components.size(); ++i) {
            const auto& comp = m.components[i];
            MixtureEnsemble::Component out;
            out.weight = comp.weight;
            if (std::holds_alternative<SyntheticComponent>(comp.source)) {
                const auto& syn = std::get<SyntheticComponent>(comp.source);
                RandomStream rng = RandomStream::substream(sc.seed, i);
                out.series =
                    run_path(syn.p0, syn.model, syn.dt, syn.n_samples, rng, syn.control);
            } else {
                out.series = detail::quantum_norm_series(
                    std::get<QuantumScenario>(comp.source));
            }
            components.push_back(std::move(out));
        }
        const MixtureEnsemble ensemble = MixtureEnsemble::validated(std::move(components));
        const PathSeries combined = combine_norms(ensemble);
        const MixtureVariance variance =
            combine_fluctuation_variance(ensemble, m.variance_dt);
        if (opt.write_csv) {
            write_path_series_csv(csv_path("combined.csv"), combined);
            for (std::size_t i = 0; i < ensemble.components.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "component_%02zu.csv", i);
                write_path_series_csv(csv_path(name), ensemble.components[i].series);
            }
        }
        json weights = json::array();
        for (const auto& c : ensemble.components) weights.push_back(c.weight);
        results = {{"weights", weights},
                   {"combined_variance", variance.combined},
                   {"per_component_variance", variance.per_component},
                   {"increment_dt", variance.increment_dt},
                   {"window", variance.window}};
        if (m.expect) {
            // Pooled weighted increments must reproduce the combined variance.
            const std::size_t n = combined.n_channels;
            std::vector<double> pooled(n, 0.0);
            for (const auto& c : ensemble.components) {
                std::size_t m_inc = 0;
                const auto inc =
                    detail::windowed_increments(c.series, variance.window, m_inc);
                for (std::size_t j = 0; j < n; ++j) {
                    double ss = 0.0;
                    for (std::size_t k = 0; k < m_inc; ++k)
                        ss += inc[k * n + j] * inc[k * n + j];
                    pooled[j] += c.weight * ss / double(m_inc);
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                const double scale = std::max(std::abs(variance.combined[j]), 1e-300);
                checks.add("pooled_variance_channel_" + std::to_string(j + 1), pooled[j],
                           variance.combined[j], m.expect->pooled_rel_tol * scale);
            }
        }
        break;
    }
    case ScenarioKind::bridge: {
        const auto& b = std::get<BridgeScenario>(sc.body);
        EvolveResult quantum_result;
        const PathSeries series = detail::quantum_norm_series(b.quantum, &quantum_result);
        if (opt.write_csv)
            write_norm_series_csv(csv_path("norms.csv"), quantum_result);
        const CorrelationEstimate est = estimate_correlations(series, b.window);
        const double a12 = est.value(0, 1);
        if (!(a12 > 0.0))
            throw ValidationError("bridge coupling produced no usable fluctuations "
                                  "(estimated A_12 = " + std::to_string(a12) + ")");
        const NormVector p0 =
            NormVector::validated({series.at(0, 0), series.at(0, 1)});
        const CorrelationModel model = CorrelationModel::constant_uniform(2, a12);
        // Estimated couplings can be tiny; unless given explicitly, the
        // ensemble runs on the diffusion's own time scale 1 / A_12.
        const double dt = b.dt.value_or(1e-3 / a12);
        const double t_max = b.t_max.value_or(50.0 / a12);
        EnsembleResult ens = run_ensemble(p0, model, b.n_trajectories, dt, t_max,
                                          sc.seed, opt.threads, b.control);
        if (opt.write_csv)
            write_trajectories_csv(csv_path("trajectories.csv"), ens.records);
        results = {{"estimated_a12", a12},
                   {"estimated_a12_se", est.error(0, 1)},
                   {"n_increments", est.n_increments},
                   {"increment_dt", est.increment_dt},
                   {"p0", {series.at(0, 0), series.at(0, 1)}},
                   {"born", detail::report_to_json(ens.report)}};
        if (b.expect) {
            const double m_done = double(std::max<std::size_t>(ens.report.n_completed, 1));
            for (std::size_t j = 0; j < 2; ++j) {
                const double want = series.at(0, j);
                const double se = std::sqrt(want * (1.0 - want) / m_done);
                checks.add("born_channel_" + std::to_string(j + 1),
                           ens.report.frequencies[j], want, b.expect->born_sigma * se);
            }
        }
        break;
    }
    }

    summary["results"] = results;
    summary["checks"] = checks.checks;
    summary["passed"] = checks.passed;
    summary["outputs"] = outcome.files_written;
    outcome.passed = checks.passed;

    if (opt.write_summary) {
        const auto path = opt.out_dir / "summary.json";
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot write " + path.string());
        out << summary.dump(2) << '\n';
        outcome.files_written.push_back("summary.json");
    }
    return outcome;
}

} // namespace qreduce
