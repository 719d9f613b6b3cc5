#pragma once

#include <cstddef>
#include <vector>

#include "qreduce/errors.hpp"

namespace qreduce {

/// Uniformly sampled time series of a channel-norm vector p(t).
/// Sample i, channel j lives at values[i * n_channels + j]; sample i is at
/// time t0 + i * dt.
struct PathSeries {
    std::size_t n_channels = 0;
    double dt = 0.0;
    double t0 = 0.0;
    std::vector<double> values; // row-major, n_samples x n_channels

    std::size_t n_samples() const {
        return n_channels == 0 ? 0 : values.size() / n_channels;
    }

    double at(std::size_t sample, std::size_t channel) const {
        return values[sample * n_channels + channel];
    }

    double time(std::size_t sample) const { return t0 + double(sample) * dt; }

    void append(const std::vector<double>& p) {
        if (p.size() != n_channels)
            throw MismatchedGrids("sample has wrong channel count");
        values.insert(values.end(), p.begin(), p.end());
    }

    /// Samples [first, last) as a new series.
    PathSeries slice(std::size_t first, std::size_t last) const {
        if (first > last || last > n_samples())
            throw InvalidArgument("bad slice range");
        PathSeries out;
        out.n_channels = n_channels;
        out.dt = dt;
        out.t0 = time(first);
        out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first * n_channels),
                          values.begin() + static_cast<std::ptrdiff_t>(last * n_channels));
        return out;
    }
};

} // namespace qreduce
