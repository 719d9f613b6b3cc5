#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qreduce/errors.hpp"
#include "qreduce/series.hpp"

namespace qreduce {

/// Estimated correlation coefficients A_jk = -<dp_j dp_k>/dt from a sampled
/// path, off-diagonal only, with jackknife standard errors.
struct CorrelationEstimate {
    std::size_t n_channels = 0;
    std::vector<double> a;  // row-major n x n, zero diagonal
    std::vector<double> se; // same layout
    std::size_t n_increments = 0;
    double increment_dt = 0.0;

    double value(std::size_t j, std::size_t k) const { return a[j * n_channels + k]; }
    double error(std::size_t j, std::size_t k) const { return se[j * n_channels + k]; }
};

namespace detail {

/// Non-overlapping increments p[(i+1)w] - p[iw] of every channel.
inline std::vector<double> windowed_increments(const PathSeries& series, std::size_t window,
                                               std::size_t& n_increments) {
    const std::size_t n = series.n_channels;
    n_increments = (series.n_samples() - 1) / window;
    std::vector<double> inc(n_increments * n);
    for (std::size_t i = 0; i < n_increments; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inc[i * n + j] = series.at((i + 1) * window, j) - series.at(i * window, j);
    return inc;
}

/// Jackknife standard error of the sample mean of x.
inline double jackknife_se_of_mean(const std::vector<double>& x) {
    const std::size_t m = x.size();
    if (m < 2) return 0.0;
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / double(m);
    double ss = 0.0;
    for (double v : x) {
        const double loo = (sum - v) / double(m - 1); // leave-one-out mean
        const double d = loo - mean;
        ss += d * d;
    }
    return std::sqrt(double(m - 1) / double(m) * ss);
}

} // namespace detail

/// Windowed-increment estimator of the fluctuation correlations:
/// A_jk = -mean(dp_j dp_k) / dt over non-overlapping windows.
inline CorrelationEstimate estimate_correlations(const PathSeries& series,
                                                 std::size_t window) {
    if (window < 1)
        throw InvalidArgument("window must be at least 1");
    if (series.n_channels < 2)
        throw InvalidArgument("series needs at least two channels");
    if (series.n_samples() < 10 * window)
        throw SeriesTooShort("need at least 10 x window samples, have " +
                             std::to_string(series.n_samples()));

    const std::size_t n = series.n_channels;
    std::size_t m = 0;
    const std::vector<double> inc = detail::windowed_increments(series, window, m);
    const double dt = series.dt * double(window);

    CorrelationEstimate est;
    est.n_channels = n;
    est.a.assign(n * n, 0.0);
    est.se.assign(n * n, 0.0);
    est.n_increments = m;
    est.increment_dt = dt;

    std::vector<double> products(m);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            double sum = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                products[i] = inc[i * n + j] * inc[i * n + k];
                sum += products[i];
            }
            const double a = -(sum / double(m)) / dt;
            const double se = detail::jackknife_se_of_mean(products) / dt;
            est.a[j * n + k] = a;
            est.a[k * n + j] = a;
            est.se[j * n + k] = se;
            est.se[k * n + j] = se;
        }
    }
    return est;
}

/// Per-channel population variance of the windowed increments of a series.
inline std::vector<double> increment_variances(const PathSeries& series, std::size_t window) {
    if (window < 1)
        throw InvalidArgument("window must be at least 1");
    if (series.n_samples() < 10 * window)
        throw SeriesTooShort("need at least 10 x window samples, have " +
                             std::to_string(series.n_samples()));
    const std::size_t n = series.n_channels;
    std::size_t m = 0;
    const std::vector<double> inc = detail::windowed_increments(series, window, m);
    std::vector<double> var(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) mean += inc[i * n + j];
        mean /= double(m);
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = inc[i * n + j] - mean;
            ss += d * d;
        }
        var[j] = ss / double(m);
    }
    return var;
}

} // namespace qreduce
