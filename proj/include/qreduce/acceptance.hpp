#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "qreduce/diffusion.hpp"
#include "qreduce/estimators.hpp"
#include "qreduce/fokker_planck.hpp"
#include "qreduce/mixture.hpp"
#include "qreduce/quantum.hpp"
#include "qreduce/runner.hpp"
#include "qreduce/scenario.hpp"
#include "qreduce/wkb.hpp"

namespace qreduce::acceptance {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Reporter {
    std::vector<CriterionResult> results;
    bool all_passed = true;

    void add(const std::string& name, bool passed, const std::string& detail) {
        results.push_back({name, passed, detail});
        all_passed = all_passed && passed;
    }
};

/// Steps a trajectory manually and verifies, state by state, that absorbed
/// channels stay exactly zero and the terminal state is a simplex vertex.
inline bool tracked_trajectory_is_final(const NormVector& p0, const CorrelationModel& model,
                                        double dt, double t_max, RandomStream& rng) {
    NormVector p = p0;
    std::vector<bool> dead(p.size(), false);
    for (std::size_t j = 0; j < p.size(); ++j) dead[j] = !p.active(j);
    double t = 0.0;
    while (p.active_count() > 1 && t < t_max) {
        step(p, model, t, dt, rng);
        t += dt;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (dead[j]) {
                if (p.active(j) || p.value(j) != 0.0) return false; // revived
            } else if (!p.active(j)) {
                if (p.value(j) != 0.0) return false; // absorbed but nonzero
                dead[j] = true;
            }
        }
    }
    if (p.active_count() != 1) return false;
    const std::size_t winner = p.force_vertex();
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double want = j == winner ? 1.0 : 0.0;
        if (p.value(j) != want) return false;
    }
    return true;
}

inline bool record_is_consistent(const AbsorptionRecord& rec, std::size_t n_channels) {
    if (rec.timed_out || !rec.winner) return false;
    if (rec.absorption_order.size() != n_channels - 1) return false;
    std::set<std::size_t> seen;
    double prev = 0.0;
    for (const auto& ev : rec.absorption_order) {
        if (ev.channel == *rec.winner) return false;
        if (!seen.insert(ev.channel).second) return false;
        if (ev.time < prev) return false;
        prev = ev.time;
    }
    return true;
}

} // namespace detail

/// Runs every acceptance criterion at its pinned tolerance.
inline std::vector<CriterionResult> run_all(unsigned threads = 1) {
    using detail::fmt;
    detail::Reporter reporter;

    constexpr std::uint64_t kSeed = 20240901;

    // ---- 1 & 2: Born-rule emergence + absorption finality --------------
    {
        const std::vector<std::vector<double>> starts = {
            {0.3, 0.7}, {0.5, 0.5}, {0.2, 0.3, 0.5}, {0.1, 0.2, 0.3, 0.4}};
        constexpr std::size_t kN = 100000;
        bool born_ok = true;
        bool finality_ok = true;
        std::string born_detail;
        std::size_t n_checked = 0;
        for (std::size_t c = 0; c < starts.size(); ++c) {
            const NormVector p0 = NormVector::validated(starts[c]);
            const CorrelationModel model = CorrelationModel::constant_uniform(p0.size(), 1.0);
            const EnsembleResult ens =
                run_ensemble(p0, model, kN, 1e-3, 50.0, kSeed + c, threads);
            if (ens.report.n_timeouts != 0) born_ok = false;
            for (std::size_t j = 0; j < p0.size(); ++j) {
                const double want = starts[c][j];
                const double tol = 3.0 * std::sqrt(want * (1.0 - want) / double(kN));
                const double got = ens.report.frequencies[j];
                if (std::abs(got - want) > tol) born_ok = false;
                if (c == 0 && j == 0)
                    born_detail = "f(0.3) = " + fmt(got) + " +- " + fmt(tol);
            }
            for (const auto& rec : ens.records) {
                ++n_checked;
                if (!detail::record_is_consistent(rec, p0.size())) finality_ok = false;
            }
        }
        // State-level finality spot check with full tracking.
        {
            const NormVector p0 = NormVector::validated({0.2, 0.3, 0.5});
            const CorrelationModel model = CorrelationModel::constant_uniform(3, 1.0);
            for (std::size_t i = 0; i < 2000; ++i) {
                RandomStream rng = RandomStream::substream(kSeed + 17, i);
                if (!detail::tracked_trajectory_is_final(p0, model, 1e-3, 50.0, rng))
                    finality_ok = false;
            }
        }
        reporter.add("born_rule_emergence", born_ok,
                     "4 starts, n = 100000, 3 binomial sigma per channel; " + born_detail);
        reporter.add("absorption_finality", finality_ok,
                     fmt(double(n_checked)) + " records consistent, 2000 tracked "
                     "trajectories end at a vertex with no revival");
    }

    // ---- 3: mean first-passage oracle T(x) = x (1 - x) / A -------------
    {
        bool ok = true;
        std::string detail_s;
        constexpr std::size_t kN = 10000;
        int idx = 0;
        for (double x : {0.2, 0.5, 0.8}) {
            const NormVector p0 = NormVector::validated({x, 1.0 - x});
            const CorrelationModel model = CorrelationModel::constant_uniform(2, 1.0);
            const EnsembleResult ens =
                run_ensemble(p0, model, kN, 1e-3, 50.0, kSeed + 100 + idx++, threads);
            const double want = x * (1.0 - x);
            const double got = ens.report.mean_hitting_time;
            if (std::abs(got - want) > 0.05 * want) ok = false;
            detail_s += "T(" + fmt(x) + ") = " + fmt(got) + " vs " + fmt(want) + "; ";
        }
        reporter.add("mean_first_passage", ok, detail_s + "tolerance 5%");
    }

    // ---- 4: MC / PDE cross-validation -----------------------------------
    {
        bool ok = true;
        std::string detail_s;
        int idx = 0;
        for (double x0 : {0.3, 0.5}) {
            const FpGrid grid = FpGrid::validated(405, 0.5);
            const FpSolution sol = solve(grid, x0, 5.0, 1e-3);
            const NormVector p0 = NormVector::validated({x0, 1.0 - x0});
            const CorrelationModel model = CorrelationModel::constant_uniform(2, 1.0);
            const EnsembleResult ens =
                run_ensemble(p0, model, 100000, 1e-3, 50.0, kSeed + 200 + idx++, threads);
            const double se0 = ens.report.standard_errors[0];
            const double tol = 3.0 * se0 + 1e-3;
            // x = p_1, so mass absorbed at x = 1 is the channel-1 win share.
            const double d1 = std::abs(ens.report.frequencies[0] - sol.absorbed_mass_1());
            const double d0 = std::abs(ens.report.frequencies[1] - sol.absorbed_mass_0());
            if (d0 > tol || d1 > tol) ok = false;
            detail_s += "x0 = " + fmt(x0) + ": |MC - PDE| = " + fmt(std::max(d0, d1)) +
                        " <= " + fmt(tol) + "; ";
        }
        reporter.add("mc_pde_cross_validation", ok, detail_s);
    }

    // ---- 5: spectral decay vs smallest eigenvalue ------------------------
    {
        const FpGrid grid = FpGrid::validated(405, 0.5);
        const FpSolution sol = solve(grid, 0.5, 3.0, 1e-3);
        const double rate = survival_decay_rate(sol);
        const double lambda1 = smallest_eigenvalue(build_generator(grid));
        const double pi = 3.141592653589793238462643383279502884;
        const double lambda1_exact = pi * pi / 2.0; // D pi^2 with D = 1/2
        const bool rate_ok = std::abs(rate - lambda1) <= 0.02 * lambda1;
        const bool gap_ok = std::abs(1.0 / lambda1 - 2.0 / (pi * pi)) <=
                            0.01 * (2.0 / (pi * pi));
        reporter.add("spectral_decay_rate", rate_ok && gap_ok,
                     "decay " + fmt(rate) + " vs lambda_1 " + fmt(lambda1) +
                         " (exact " + fmt(lambda1_exact) + "); 1/lambda_1 = " +
                         fmt(1.0 / lambda1) + " vs exact mean hitting time 0.25");
    }

    // ---- 6: pointer conservation ----------------------------------------
    {
        const GridSpec grid = GridSpec::validated(-24.0, 24.0, 1024);
        CouplingSpec spec;
        spec.potential = {PotentialSpec::Kind::harmonic, 1.0};
        spec.lambda_z = CouplingField{0.3, 0.15, 2.0}; // x- and t-dependent, diagonal
        TwoChannelState state =
            init_state({0.6, 0.0}, {0.0, 0.8}, {0.0, 1.0, 0.5}, grid);
        const EvolveResult res = evolve(state, spec, grid, 1e-3, 10000, 10);
        double p_drift = 0.0, norm_drift = 0.0;
        for (std::size_t i = 0; i < res.series.n_samples(); ++i) {
            for (std::size_t j = 0; j < 2; ++j)
                p_drift = std::max(p_drift, std::abs(res.series.at(i, j) -
                                                     res.series.at(0, j)));
            norm_drift = std::max(norm_drift,
                                  std::abs(res.total_norm[i] - res.total_norm[0]));
        }
        reporter.add("pointer_conservation", p_drift <= 1e-8 && norm_drift <= 1e-8,
                     "max channel-norm drift " + fmt(p_drift) + ", total-norm drift " +
                         fmt(norm_drift) + " over 10000 steps");
    }

    // ---- 7: Rabi oracle ----------------------------------------------------
    {
        struct Setting {
            double lambda;
            Complex c1, c2;
        };
        const std::vector<Setting> settings = {
            {0.5, {1.0, 0.0}, {0.0, 0.0}},
            {0.3, {1.0 / std::sqrt(2.0), 0.0}, {1.0 / std::sqrt(2.0), 0.0}},
            {0.8, {0.6, 0.0}, {0.0, 0.8}},
        };
        bool ok = true;
        double worst = 0.0;
        for (const auto& s : settings) {
            const GridSpec grid = GridSpec::validated(-24.0, 24.0, 1024);
            CouplingSpec spec;
            spec.potential = {PotentialSpec::Kind::harmonic, 1.0};
            spec.lambda_x = CouplingField::constant(s.lambda);
            TwoChannelState state = init_state(s.c1, s.c2, {0.0, 1.0, 0.0}, grid);
            const EvolveResult res = evolve(state, spec, grid, 1e-3, 6000, 10);
            for (std::size_t i = 0; i < res.series.n_samples(); ++i) {
                const double t = res.series.time(i);
                const double err = std::abs(res.series.at(i, 0) -
                                            rabi_p1(s.c1, s.c2, s.lambda, grid.hbar, t));
                worst = std::max(worst, err);
            }
        }
        ok = worst <= 1e-6;
        reporter.add("rabi_oracle", ok,
                     "3 settings, max |p1 - closed form| = " + fmt(worst) + " <= 1e-6");
    }

    // ---- 8: fluctuation bridge -------------------------------------------
    {
        // (a) the estimator recovers a known synthetic A.
        const NormVector p0 = NormVector::validated({0.5, 0.5});
        const CorrelationModel model = CorrelationModel::constant_uniform(2, 0.8);
        RandomStream rng = RandomStream::substream(kSeed + 300, 0);
        const PathSeries series = run_path(p0, model, 1e-6, 20001, rng);
        const CorrelationEstimate est = estimate_correlations(series, 10);
        const bool synth_ok = std::abs(est.value(0, 1) - 0.8) <= 0.08;

        // (b) a non-diagonal quantum coupling yields a positive estimate.
        const GridSpec grid = GridSpec::validated(-24.0, 24.0, 1024);
        CouplingSpec spec;
        spec.potential = {PotentialSpec::Kind::harmonic, 1.0};
        spec.lambda_x = CouplingField::linear(0.5, 0.2);
        TwoChannelState state = init_state({1.0, 0.0}, {0.0, 0.0}, {0.0, 1.0, 0.0}, grid);
        const EvolveResult res = evolve(state, spec, grid, 1e-3, 4000, 2);
        const CorrelationEstimate qest = estimate_correlations(res.series, 10);
        const double a12 = qest.value(0, 1);
        const double se12 = qest.error(0, 1);
        const bool quantum_ok = a12 > 0.0 && se12 > 0.0 && a12 >= 3.0 * se12;

        reporter.add("fluctuation_bridge", synth_ok && quantum_ok,
                     "synthetic A = 0.8 -> " + fmt(est.value(0, 1)) +
                         " (10% tolerance); quantum A_12 = " + fmt(a12) + " at " +
                         fmt(se12 > 0.0 ? a12 / se12 : 0.0) + " sigma");
    }

    // ---- 9: mixture variance combination (Eq.-level worked value) ----------
    {
        // Worked value: variances (4e-4, 0) at weights (0.25, 0.75) -> exactly 1e-4.
        const double worked = combine_component_variances({0.25, 0.75}, {4e-4, 0.0});
        // Series route with exactly representable +-2^-6 increments.
        const double a = 0.015625;
        PathSeries osc;
        osc.n_channels = 2;
        osc.dt = 1e-3;
        for (std::size_t i = 0; i < 201; ++i) {
            const double p1 = (i % 2 == 0) ? 0.5 : 0.5 + a;
            osc.append({p1, 1.0 - p1});
        }
        PathSeries flat;
        flat.n_channels = 2;
        flat.dt = 1e-3;
        for (std::size_t i = 0; i < 201; ++i) flat.append({0.4, 0.6});

        const MixtureEnsemble worked_ens =
            MixtureEnsemble::validated({{0.25, osc}, {0.75, flat}});
        const MixtureVariance wv = combine_fluctuation_variance(worked_ens, 1e-3);
        const bool worked_ok = worked == 1e-4 && wv.combined[0] == 0.25 * (a * a);

        // Independent synthetic components with equal variance.
        const NormVector p0 = NormVector::validated({0.5, 0.5});
        const CorrelationModel model = CorrelationModel::constant_uniform(2, 1.0);
        RandomStream r1 = RandomStream::substream(kSeed + 400, 0);
        RandomStream r2 = RandomStream::substream(kSeed + 400, 1);
        const PathSeries s1 = run_path(p0, model, 1e-6, 20001, r1);
        const PathSeries s2 = run_path(p0, model, 1e-6, 20001, r2);
        const MixtureEnsemble mix = MixtureEnsemble::validated({{0.25, s1}, {0.75, s2}});
        const MixtureVariance mv = combine_fluctuation_variance(mix, 1e-5);
        const double want = 1.0 * 1e-5; // A dt over the increment interval
        const std::size_t m = (s1.n_samples() - 1) / mv.window;
        const double se = std::sqrt(2.0 / double(m)) * want; // per-component spread
        const bool stat_ok = std::abs(mv.combined[0] - want) <= 4.0 * se;

        // Pooled weighted increments reproduce the combination.
        double pooled = 0.0;
        for (const auto& c : mix.components) {
            std::size_t m_inc = 0;
            const auto inc = qreduce::detail::windowed_increments(c.series, mv.window, m_inc);
            double ss = 0.0;
            for (std::size_t i = 0; i < m_inc; ++i) ss += inc[i * 2] * inc[i * 2];
            pooled += c.weight * ss / double(m_inc);
        }
        const bool pooled_ok = std::abs(pooled - mv.combined[0]) <= 0.01 * mv.combined[0];

        reporter.add("mixture_variance", worked_ok && stat_ok && pooled_ok,
                     "worked value 0.25 * 4e-4 = " + fmt(worked) +
                         "; independent components " + fmt(mv.combined[0]) + " vs " +
                         fmt(want) + "; pooled " + fmt(pooled));
    }

    // ---- 10: determinism across thread counts ------------------------------
    {
        const std::string scenario_text = R"({
            "kind": "diffusion",
            "seed": 4242,
            "diffusion": {
                "p0": [0.3, 0.7],
                "model": {"kind": "constant", "value": 1.0},
                "n_trajectories": 2000,
                "dt": 1e-3,
                "t_max": 50.0,
                "expect": {"frequencies": [0.3, 0.7], "n_sigma": 4.0}
            }
        })";
        namespace fs = std::filesystem;
        const Scenario sc = parse_scenario(scenario_text);
        const fs::path base =
            fs::temp_directory_path() / ("qreduce-accept-" + std::to_string(::getpid()));
        bool ok = true;
        std::string why;
        std::vector<std::string> names;
        {
            RunOptions o1{base / "t1", 1, true, true};
            RunOptions o8{base / "t8", 8, true, true};
            const RunOutcome r1 = run_scenario(sc, o1);
            const RunOutcome r8 = run_scenario(sc, o8);
            names = r1.files_written;
            if (r1.files_written != r8.files_written) {
                ok = false;
                why = "file lists differ";
            }
            for (const auto& name : names) {
                std::ifstream f1(base / "t1" / name, std::ios::binary);
                std::ifstream f8(base / "t8" / name, std::ios::binary);
                std::stringstream b1, b8;
                b1 << f1.rdbuf();
                b8 << f8.rdbuf();
                if (b1.str() != b8.str()) {
                    ok = false;
                    why = name + " differs between thread counts";
                }
            }
            if (ok && !r1.passed) {
                ok = false;
                why = "scenario tolerance check failed";
            }
        }
        std::error_code cleanup;
        fs::remove_all(base, cleanup);
        reporter.add("determinism", ok,
                     ok ? std::to_string(names.size()) +
                              " output files byte-identical at threads 1 and 8"
                        : why);
    }

    return reporter.results;
}

inline bool print_and_check(const std::vector<CriterionResult>& results) {
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %s - %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all = all && r.passed;
    }
    return all;
}

} // namespace qreduce::acceptance
