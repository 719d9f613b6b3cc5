#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qreduce/errors.hpp"
#include "qreduce/norm_vector.hpp"

namespace qreduce {

/// Fluctuation correlation coefficients A_jk(p, t) for the simplex diffusion.
///
/// Three kinds:
///   constant  -- A_jk = a_jk
///   bilinear  -- A_jk = gain * p_j * p_k (vanishes on the simplex boundary)
///   time_ramp -- A_jk = a_jk * min(t / ramp_time, 1)
///
/// The base matrix is symmetric with zero diagonal and nonnegative entries,
/// so every evaluation is nonnegative.
class CorrelationModel {
public:
    enum class Kind { constant, bilinear, time_ramp };

    static CorrelationModel constant(std::vector<std::vector<double>> base) {
        return CorrelationModel(Kind::constant, flatten_validated(std::move(base)), 0.0, 0.0);
    }

    /// Constant model with every off-diagonal coefficient equal to `value`.
    static CorrelationModel constant_uniform(std::size_t n_channels, double value) {
        std::vector<std::vector<double>> base(n_channels, std::vector<double>(n_channels, value));
        for (std::size_t j = 0; j < n_channels; ++j) base[j][j] = 0.0;
        return constant(std::move(base));
    }

    static CorrelationModel bilinear(std::size_t n_channels, double gain) {
        if (n_channels < 2)
            throw InvalidArgument("bilinear model needs at least two channels");
        if (!(gain >= 0.0) || !std::isfinite(gain))
            throw InvalidArgument("bilinear gain must be finite and nonnegative");
        CorrelationModel m(Kind::bilinear, {}, gain, 0.0);
        m.n_ = n_channels;
        return m;
    }

    static CorrelationModel time_ramp(std::vector<std::vector<double>> base, double ramp_time) {
        if (!(ramp_time > 0.0) || !std::isfinite(ramp_time))
            throw InvalidArgument("ramp_time must be finite and positive");
        return CorrelationModel(Kind::time_ramp, flatten_validated(std::move(base)), 0.0, ramp_time);
    }

    Kind kind() const { return kind_; }
    std::size_t channels() const { return n_; }
    double gain() const { return gain_; }
    double ramp_time() const { return ramp_time_; }

    double evaluate(std::size_t j, std::size_t k, const std::vector<double>& p, double t) const {
        switch (kind_) {
        case Kind::constant:
            return base_[j * n_ + k];
        case Kind::bilinear:
            return gain_ * p[j] * p[k];
        case Kind::time_ramp:
            return base_[j * n_ + k] * std::clamp(t / ramp_time_, 0.0, 1.0);
        }
        return 0.0;
    }

    double evaluate(std::size_t j, std::size_t k, const NormVector& p, double t) const {
        return evaluate(j, k, p.values(), t);
    }

private:
    CorrelationModel(Kind kind, std::vector<double> base, double gain, double ramp_time)
        : kind_(kind), base_(std::move(base)), gain_(gain), ramp_time_(ramp_time) {
        if (!base_.empty())
            n_ = static_cast<std::size_t>(std::lround(std::sqrt(double(base_.size()))));
    }

    static std::vector<double> flatten_validated(std::vector<std::vector<double>> base) {
        const std::size_t n = base.size();
        if (n < 2)
            throw InvalidArgument("coefficient matrix needs at least two channels");
        std::vector<double> flat(n * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (base[j].size() != n)
                throw InvalidArgument("coefficient matrix must be square");
            for (std::size_t k = 0; k < n; ++k) {
                const double a = base[j][k];
                if (!std::isfinite(a))
                    throw InvalidArgument("coefficient a_" + std::to_string(j) + "," +
                                          std::to_string(k) + " not finite");
                if (a < 0.0)
                    throw InvalidArgument("coefficient a_" + std::to_string(j) + "," +
                                          std::to_string(k) + " below zero");
                flat[j * n + k] = a;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (flat[j * n + j] != 0.0)
                throw InvalidArgument("coefficient diagonal must be zero");
            for (std::size_t k = 0; k < j; ++k)
                if (flat[j * n + k] != flat[k * n + j])
                    throw InvalidArgument("coefficient matrix must be symmetric");
        }
        return flat;
    }

    Kind kind_;
    std::size_t n_ = 0;
    std::vector<double> base_; // row-major n x n, used by constant / time_ramp
    double gain_ = 0.0;
    double ramp_time_ = 0.0;
};

} // namespace qreduce
