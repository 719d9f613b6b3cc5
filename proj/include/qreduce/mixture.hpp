#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qreduce/errors.hpp"
#include "qreduce/estimators.hpp"
#include "qreduce/series.hpp"

namespace qreduce {

/// Weighted ensemble of channel-norm trajectories: the eigencomponents of a
/// reduced density matrix, with fixed weights.
struct MixtureEnsemble {
    struct Component {
        double weight = 0.0;
        PathSeries series;
    };

    std::vector<Component> components;

    static MixtureEnsemble validated(std::vector<Component> components) {
        if (components.empty())
            throw InvalidArgument("ensemble needs at least one component");
        double total = 0.0;
        for (const auto& c : components) {
            if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
                throw InvalidArgument("component weight must be finite and nonnegative");
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw NotNormalized("weights sum to " + std::to_string(total));
        const auto& ref = components.front().series;
        for (const auto& c : components) {
            if (c.series.n_channels != ref.n_channels ||
                c.series.n_samples() != ref.n_samples() ||
                std::abs(c.series.dt - ref.dt) > 1e-12 * std::abs(ref.dt))
                throw MismatchedGrids("component series disagree on channels or time grid");
        }
        MixtureEnsemble e;
        e.components = std::move(components);
        return e;
    }
};

/// Convex combination p_j(t) = sum_a pi_a p_ja(t), per time point.
inline PathSeries combine_norms(const MixtureEnsemble& ensemble) {
    const auto& ref = ensemble.components.front().series;
    PathSeries out;
    out.n_channels = ref.n_channels;
    out.dt = ref.dt;
    out.t0 = ref.t0;
    out.values.assign(ref.values.size(), 0.0);
    for (const auto& c : ensemble.components)
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += c.weight * c.series.values[i];
    return out;
}

struct MixtureVariance {
    std::vector<double> combined;                   // per channel
    std::vector<std::vector<double>> per_component; // [component][channel]
    double increment_dt = 0.0;
    std::size_t window = 0;
};

/// The bare combination kernel: (Delta dp)^2 = sum_a pi_a (Delta dp_a)^2.
inline double combine_component_variances(const std::vector<double>& weights,
                                          const std::vector<double>& variances) {
    if (weights.size() != variances.size())
        throw InvalidArgument("weights and variances differ in length");
    double combined = 0.0;
    for (std::size_t a = 0; a < weights.size(); ++a)
        combined += weights[a] * variances[a];
    return combined;
}

/// Weighted combination of the per-component increment variances:
/// (Delta dp_j)^2 = sum_a pi_a (Delta dp_ja)^2, each component variance
/// measured from its own series with the same windowed estimator as
/// estimate_correlations. `dt` is the increment interval and must be a
/// multiple of the series sampling step.
inline MixtureVariance combine_fluctuation_variance(const MixtureEnsemble& ensemble,
                                                    double dt) {
    const auto& ref = ensemble.components.front().series;
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be positive");
    const double ratio = dt / ref.dt;
    const auto window = static_cast<std::size_t>(std::llround(ratio));
    if (window < 1 || std::abs(ratio - double(window)) > 1e-9)
        throw InvalidArgument("dt must be a positive multiple of the series step " +
                              std::to_string(ref.dt));

    MixtureVariance out;
    out.window = window;
    out.increment_dt = double(window) * ref.dt;
    for (const auto& c : ensemble.components)
        out.per_component.push_back(increment_variances(c.series, window));
    std::vector<double> weights;
    for (const auto& c : ensemble.components) weights.push_back(c.weight);
    out.combined.resize(ref.n_channels);
    std::vector<double> channel_vars(ensemble.components.size());
    for (std::size_t j = 0; j < ref.n_channels; ++j) {
        for (std::size_t a = 0; a < ensemble.components.size(); ++a)
            channel_vars[a] = out.per_component[a][j];
        out.combined[j] = combine_component_variances(weights, channel_vars);
    }
    return out;
}

} // namespace qreduce
