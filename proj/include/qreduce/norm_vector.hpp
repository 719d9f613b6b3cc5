#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "qreduce/errors.hpp"

namespace qreduce {

/// Vector of channel squared norms: a point of the probability simplex.
///
/// Channels that reach zero are marked inactive and never move again. All
/// mutation goes through apply_exchange / force_vertex, which preserve the
/// sum and the absorption rule by construction.
class NormVector {
public:
    static constexpr double kSumTolerance = 1e-9;

    /// Validates and builds; entries that are exactly zero start inactive.
    static NormVector validated(std::vector<double> values) {
        if (values.empty())
            throw InvalidArgument("norm vector must not be empty");
        for (double v : values) {
            if (!std::isfinite(v))
                throw InvalidArgument("norm vector entry not finite");
            if (v < 0.0)
                throw NegativeEntry("norm vector entry below zero");
        }
        const double total = std::accumulate(values.begin(), values.end(), 0.0);
        if (!(std::abs(total - 1.0) <= kSumTolerance))
            throw NotNormalized("norm vector sums to " + std::to_string(total));
        return NormVector(std::move(values));
    }

    std::size_t size() const { return values_.size(); }
    double value(std::size_t j) const { return values_[j]; }
    bool active(std::size_t j) const { return active_[j] != 0; }
    std::size_t active_count() const { return n_active_; }
    const std::vector<double>& values() const { return values_; }

    double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

    /// Applies p_j += delta, p_k -= delta, truncating delta to [-p_j, p_k] so
    /// a crossing lands exactly at zero; the zeroed channel is deactivated.
    /// Returns the increment actually applied.
    double apply_exchange(std::size_t j, std::size_t k, double delta) {
        const double lo = -values_[j];
        const double hi = values_[k];
        const double d = std::clamp(delta, lo, hi);
        if (d == lo) {
            values_[k] += values_[j];
            deactivate(j);
        } else if (d == hi) {
            values_[j] += values_[k];
            deactivate(k);
        } else {
            values_[j] += d;
            values_[k] -= d;
        }
        return d;
    }

    /// With one channel left, snaps its value to exactly 1. Returns its index.
    std::size_t force_vertex() {
        if (n_active_ != 1)
            throw InvalidArgument("force_vertex requires exactly one active channel");
        for (std::size_t j = 0; j < values_.size(); ++j) {
            if (active(j)) {
                values_[j] = 1.0;
                return j;
            }
        }
        return 0; // unreachable
    }

private:
    explicit NormVector(std::vector<double> values)
        : values_(std::move(values)), active_(values_.size(), 1) {
        for (std::size_t j = 0; j < values_.size(); ++j)
            if (values_[j] == 0.0) active_[j] = 0;
        n_active_ = static_cast<std::size_t>(
            std::count(active_.begin(), active_.end(), std::uint8_t{1}));
    }

    void deactivate(std::size_t j) {
        values_[j] = 0.0;
        if (active_[j]) {
            active_[j] = 0;
            --n_active_;
        }
    }

    std::vector<double> values_;
    std::vector<std::uint8_t> active_;
    std::size_t n_active_ = 0;
};

} // namespace qreduce
