#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "qreduce/correlation_model.hpp"
#include "qreduce/errors.hpp"
#include "qreduce/norm_vector.hpp"
#include "qreduce/rng.hpp"
#include "qreduce/series.hpp"

namespace qreduce {

/// Sub-stepping control for the simplex stepper. A step interval is halved
/// (recursively, at most max_halvings deep) while any active pair satisfies
/// sqrt(A_jk * dt) > theta * min(p_j, p_k), which keeps boundary-truncation
/// bias negligible until a channel is within the final sub-step scale of zero.
struct StepControl {
    double theta = 0.1;
    int max_halvings = 20;
};

struct AbsorptionEvent {
    std::size_t channel = 0;
    double time = 0.0;
};

/// Outcome of a single trajectory. `winner` is a channel index once the
/// state has been absorbed at a simplex vertex; a timed-out run carries no
/// winner and is flagged instead.
struct AbsorptionRecord {
    std::optional<std::size_t> winner;
    double hitting_time = 0.0;
    std::uint64_t steps = 0; // flat sub-steps applied
    std::vector<AbsorptionEvent> absorption_order;
    bool timed_out = false;
};

struct BornReport {
    std::size_t n_trajectories = 0;
    std::size_t n_completed = 0;
    std::size_t n_timeouts = 0;
    std::vector<double> frequencies;     // winner frequencies over completed runs
    std::vector<double> standard_errors; // sqrt(f (1-f) / n_completed)
    double mean_hitting_time = 0.0;
    double hitting_time_stddev = 0.0;
};

namespace detail {

inline bool pair_needs_refinement(double a, double dt, double theta, double pj, double pk) {
    const double scale = theta * std::min(pj, pk);
    return a * dt > scale * scale;
}

inline void check_finite(double a) {
    if (!std::isfinite(a))
        throw NonFiniteIncrement("correlation model evaluated to a non-finite value");
}

/// One flat Euler sub-step: a zero-mean Gaussian exchange per active pair,
/// pairs processed in ascending (j, k) order. Coefficients are frozen at the
/// sub-step start so the pair increments realize cov(dp_j, dp_k) = -A_jk dt
/// exactly; exchanges are applied sequentially with truncation at zero.
inline void flat_step(NormVector& p, const CorrelationModel& model, double t, double dt,
                      RandomStream& rng, std::vector<AbsorptionEvent>* events,
                      std::vector<double>& frozen) {
    frozen = p.values();
    const std::size_t n = p.size();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (!p.active(j)) continue;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (!p.active(k)) continue;
            const double a = model.evaluate(j, k, frozen, t);
            check_finite(a);
            if (a == 0.0) continue;
            const double delta = rng.next_normal() * std::sqrt(a * dt);
            p.apply_exchange(j, k, delta);
            if (events) {
                if (!p.active(j)) events->push_back({j, t + dt});
                if (!p.active(k)) events->push_back({k, t + dt});
            }
            if (!p.active(j)) break;
        }
    }
}

inline bool needs_refinement(const NormVector& p, const CorrelationModel& model, double t,
                             double dt, double theta) {
    const std::size_t n = p.size();
    const auto& values = p.values();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (!p.active(j)) continue;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (!p.active(k)) continue;
            const double a = model.evaluate(j, k, values, t);
            check_finite(a);
            if (a == 0.0) continue;
            if (pair_needs_refinement(a, dt, theta, values[j], values[k])) return true;
        }
    }
    return false;
}

inline void step_recursive(NormVector& p, const CorrelationModel& model, double t, double dt,
                           RandomStream& rng, const StepControl& ctl, int depth,
                           std::vector<AbsorptionEvent>* events, std::uint64_t* leaf_steps,
                           std::vector<double>& scratch) {
    if (p.active_count() <= 1) return;
    if (depth < ctl.max_halvings && needs_refinement(p, model, t, dt, ctl.theta)) {
        const double half = 0.5 * dt;
        step_recursive(p, model, t, half, rng, ctl, depth + 1, events, leaf_steps, scratch);
        step_recursive(p, model, t + half, half, rng, ctl, depth + 1, events, leaf_steps, scratch);
        return;
    }
    flat_step(p, model, t, dt, rng, events, scratch);
    if (leaf_steps) ++*leaf_steps;
}

} // namespace detail

/// Advances the state by one interval dt of the martingale simplex diffusion,
/// sub-stepping adaptively near the boundary.
inline void step(NormVector& state, const CorrelationModel& model, double t, double dt,
                 RandomStream& rng, const StepControl& ctl = {},
                 std::vector<AbsorptionEvent>* events = nullptr,
                 std::uint64_t* leaf_steps = nullptr) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument("dt must be finite and positive");
    std::vector<double> scratch;
    detail::step_recursive(state, model, t, dt, rng, ctl, 0, events, leaf_steps, scratch);
}

/// Runs one trajectory until a single channel survives (its value is then
/// snapped to exactly 1) or t_max is exceeded.
inline AbsorptionRecord run_trajectory(const NormVector& p0, const CorrelationModel& model,
                                       double dt, double t_max, RandomStream& rng,
                                       const StepControl& ctl = {}) {
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw InvalidArgument("dt and t_max must be positive");

    NormVector p = p0;
    AbsorptionRecord rec;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (!p.active(j)) rec.absorption_order.push_back({j, 0.0});

    std::vector<double> scratch;
    double t = 0.0;
    while (p.active_count() > 1 && t < t_max) {
        detail::step_recursive(p, model, t, dt, rng, ctl, 0, &rec.absorption_order,
                               &rec.steps, scratch);
        t += dt;
    }

    if (p.active_count() == 1) {
        rec.winner = p.force_vertex();
        rec.hitting_time =
            rec.absorption_order.empty() ? 0.0 : rec.absorption_order.back().time;
    } else {
        rec.timed_out = true;
        rec.hitting_time = t_max;
    }
    return rec;
}

/// Records the state at uniform intervals dt for n_samples samples (the first
/// sample is the initial state). Fully absorbed states keep being recorded.
inline PathSeries run_path(const NormVector& p0, const CorrelationModel& model, double dt,
                           std::size_t n_samples, RandomStream& rng,
                           const StepControl& ctl = {}) {
    if (n_samples < 1)
        throw InvalidArgument("n_samples must be at least 1");
    NormVector p = p0;
    PathSeries series;
    series.n_channels = p.size();
    series.dt = dt;
    series.values.reserve(n_samples * p.size());
    series.append(p.values());
    std::vector<double> scratch;
    for (std::size_t i = 1; i < n_samples; ++i) {
        detail::step_recursive(p, model, double(i - 1) * dt, dt, rng, ctl, 0, nullptr,
                               nullptr, scratch);
        series.append(p.values());
    }
    return series;
}

struct EnsembleResult {
    BornReport report;
    std::vector<AbsorptionRecord> records;
};

/// Runs n independent trajectories. Trajectory i always uses
/// RandomStream::substream(seed, i), and aggregation runs in index order, so
/// the result is identical at every thread count.
inline EnsembleResult run_ensemble(const NormVector& p0, const CorrelationModel& model,
                                   std::size_t n, double dt, double t_max,
                                   std::uint64_t seed, unsigned n_threads = 1,
                                   const StepControl& ctl = {}) {
    if (n < 1)
        throw InvalidArgument("ensemble needs at least one trajectory");

    EnsembleResult result;
    result.records.resize(n);

    auto run_range = [&](std::atomic<std::size_t>& cursor) {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            RandomStream rng = RandomStream::substream(seed, i);
            result.records[i] = run_trajectory(p0, model, dt, t_max, rng, ctl);
        }
    };

    std::atomic<std::size_t> cursor{0};
    if (n_threads <= 1) {
        run_range(cursor);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w)
            workers.emplace_back([&] { run_range(cursor); });
        for (auto& w : workers) w.join();
    }

    BornReport& rep = result.report;
    rep.n_trajectories = n;
    rep.frequencies.assign(p0.size(), 0.0);
    rep.standard_errors.assign(p0.size(), 0.0);

    std::vector<std::size_t> wins(p0.size(), 0);
    double sum_t = 0.0;
    for (const auto& rec : result.records) {
        if (rec.timed_out) {
            ++rep.n_timeouts;
            continue;
        }
        ++rep.n_completed;
        ++wins[*rec.winner];
        sum_t += rec.hitting_time;
    }
    if (rep.n_completed > 0) {
        const double m = double(rep.n_completed);
        rep.mean_hitting_time = sum_t / m;
        double ss = 0.0;
        for (const auto& rec : result.records) {
            if (rec.timed_out) continue;
            const double d = rec.hitting_time - rep.mean_hitting_time;
            ss += d * d;
        }
        rep.hitting_time_stddev = rep.n_completed > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
        for (std::size_t j = 0; j < p0.size(); ++j) {
            const double f = double(wins[j]) / m;
            rep.frequencies[j] = f;
            rep.standard_errors[j] = std::sqrt(f * (1.0 - f) / m);
        }
    }
    return result;
}

} // namespace qreduce
