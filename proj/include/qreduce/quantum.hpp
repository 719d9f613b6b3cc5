#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qreduce/errors.hpp"
#include "qreduce/fft.hpp"
#include "qreduce/series.hpp"

namespace qreduce {

using Complex = std::complex<double>;

/// Periodic spatial grid for the collective coordinate.
struct GridSpec {
    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t n_points = 1024;
    double mass = 1.0;
    double hbar = 1.0;

    static GridSpec validated(double x_min, double x_max, std::size_t n_points,
                              double mass = 1.0, double hbar = 1.0) {
        GridSpec g{x_min, x_max, n_points, mass, hbar};
        if (!(g.x_max > g.x_min))
            throw InvalidArgument("x_max must exceed x_min");
        if (g.n_points < 256 || (g.n_points & (g.n_points - 1)) != 0)
            throw InvalidArgument("n_points must be a power of two >= 256");
        if (!(g.mass > 0.0) || !(g.hbar > 0.0))
            throw InvalidArgument("mass and hbar must be positive");
        return g;
    }

    double dx() const { return (x_max - x_min) / double(n_points); }
    double x(std::size_t i) const { return x_min + double(i) * dx(); }

    /// FFT-ordered wavenumber of bin i.
    double k(std::size_t i) const {
        const double dk = 2.0 * 3.141592653589793238462643383279502884 /
                          (double(n_points) * dx());
        const auto half = n_points / 2;
        return (i < half ? double(i) : double(i) - double(n_points)) * dk;
    }
};

/// One effective coupling field: value(x, t) = (offset + slope * x) * ramp(t),
/// ramp(t) = min(t / ramp_time, 1) when ramp_time > 0, else 1.
struct CouplingField {
    double offset = 0.0;
    double slope = 0.0;
    double ramp_time = 0.0;

    double operator()(double x, double t) const {
        double v = offset + slope * x;
        if (ramp_time > 0.0) v *= std::clamp(t / ramp_time, 0.0, 1.0);
        return v;
    }

    bool is_zero() const { return offset == 0.0 && slope == 0.0; }
    bool time_dependent() const { return ramp_time > 0.0 && !is_zero(); }

    static CouplingField constant(double value) { return {value, 0.0, 0.0}; }
    static CouplingField linear(double offset, double slope) { return {offset, slope, 0.0}; }
};

struct PotentialSpec {
    enum class Kind { zero, harmonic };
    Kind kind = Kind::harmonic;
    double omega = 1.0;

    double value(double x, double mass) const {
        if (kind == Kind::zero) return 0.0;
        return 0.5 * mass * omega * omega * x * x;
    }
};

/// Track-independent potential plus the track-pattern coupling written as
/// lambda . sigma in the two-dimensional track space.
struct CouplingSpec {
    PotentialSpec potential;
    CouplingField lambda_x;
    CouplingField lambda_y;
    CouplingField lambda_z;

    bool time_dependent() const {
        return lambda_x.time_dependent() || lambda_y.time_dependent() ||
               lambda_z.time_dependent();
    }

    bool diagonal() const { return lambda_x.is_zero() && lambda_y.is_zero(); }
};

/// Two grid wavefunctions (phi_1, phi_2), one per track channel.
class TwoChannelState {
public:
    TwoChannelState(std::vector<Complex> phi1, std::vector<Complex> phi2, double dx,
                    double t = 0.0)
        : phi1_(std::move(phi1)), phi2_(std::move(phi2)), dx_(dx), t_(t) {
        if (phi1_.size() != phi2_.size())
            throw InvalidArgument("channel grids differ in size");
    }

    std::size_t n_points() const { return phi1_.size(); }
    double dx() const { return dx_; }
    double t() const { return t_; }
    void set_t(double t) { t_ = t; }

    std::vector<Complex>& phi1() { return phi1_; }
    std::vector<Complex>& phi2() { return phi2_; }
    const std::vector<Complex>& phi1() const { return phi1_; }
    const std::vector<Complex>& phi2() const { return phi2_; }
    std::vector<Complex>& phi(std::size_t channel) { return channel == 0 ? phi1_ : phi2_; }
    const std::vector<Complex>& phi(std::size_t channel) const {
        return channel == 0 ? phi1_ : phi2_;
    }

    double channel_norm(std::size_t channel) const {
        const auto& f = channel == 0 ? phi1_ : phi2_;
        double s = 0.0;
        for (const auto& c : f) s += std::norm(c);
        return s * dx_;
    }

    double total_norm() const { return channel_norm(0) + channel_norm(1); }

private:
    std::vector<Complex> phi1_, phi2_;
    double dx_;
    double t_;
};

struct GaussianPacket {
    double center = 0.0;
    double width = 1.0; // standard deviation of |phi|^2
    double momentum = 0.0;
};

/// phi_j = c_j * phi with phi a normalized Gaussian packet, so channel norms
/// start at |c_j|^2 exactly (discrete normalization).
inline TwoChannelState init_state(Complex c1, Complex c2, const GaussianPacket& packet,
                                  const GridSpec& grid) {
    const double weight = std::norm(c1) + std::norm(c2);
    if (std::abs(weight - 1.0) > 1e-9)
        throw UnnormalizedCoefficients("|c1|^2 + |c2|^2 = " + std::to_string(weight));
    if (!(packet.width >= 4.0 * grid.dx()))
        throw UnresolvablePacket("packet width " + std::to_string(packet.width) +
                                 " below 4 dx = " + std::to_string(4.0 * grid.dx()));

    const std::size_t n = grid.n_points;
    std::vector<Complex> packet_values(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double arg = (x - packet.center) / (2.0 * packet.width);
        const double amp = std::exp(-arg * arg);
        const double phase = packet.momentum * x / grid.hbar;
        packet_values[i] = amp * Complex{std::cos(phase), std::sin(phase)};
        norm += std::norm(packet_values[i]);
    }
    norm = std::sqrt(norm * grid.dx());
    std::vector<Complex> phi1(n), phi2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Complex v = packet_values[i] / norm;
        phi1[i] = c1 * v;
        phi2[i] = c2 * v;
    }
    return TwoChannelState(std::move(phi1), std::move(phi2), grid.dx());
}

struct EvolveResult {
    PathSeries series;              // channel norms (p1, p2) at the record cadence
    std::vector<double> total_norm; // aligned with series samples
    std::vector<double> snapshot_times;
    std::vector<TwoChannelState> snapshots;
    double max_edge_amplitude = 0.0;
    bool edge_flagged = false;
};

namespace detail {

/// Per-point 2x2 unitary of a potential/coupling half-kick.
struct KickTable {
    std::vector<Complex> m11, m12, m21, m22;

    void build(const CouplingSpec& spec, const GridSpec& grid, double t, double half_dt) {
        const std::size_t n = grid.n_points;
        m11.resize(n);
        m12.resize(n);
        m21.resize(n);
        m22.resize(n);
        const double hbar = grid.hbar;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(i);
            const double v = spec.potential.value(x, grid.mass);
            const double lx = spec.lambda_x(x, t);
            const double ly = spec.lambda_y(x, t);
            const double lz = spec.lambda_z(x, t);
            const double lam = std::sqrt(lx * lx + ly * ly + lz * lz);
            const double vangle = -v * half_dt / hbar;
            const Complex phase{std::cos(vangle), std::sin(vangle)};
            if (lam == 0.0) {
                m11[i] = phase;
                m22[i] = phase;
                m12[i] = {0.0, 0.0};
                m21[i] = {0.0, 0.0};
            } else {
                // exp(-i a (n.sigma)) = cos(a) I - i sin(a) (n.sigma)
                const double a = lam * half_dt / hbar;
                const double c = std::cos(a);
                const double s = std::sin(a) / lam;
                const Complex isc = Complex{0.0, -1.0} * s;
                m11[i] = phase * (c + isc * lz);
                m22[i] = phase * (c - isc * lz);
                m12[i] = phase * (isc * Complex{lx, -ly});
                m21[i] = phase * (isc * Complex{lx, ly});
            }
        }
    }

    void apply(std::vector<Complex>& phi1, std::vector<Complex>& phi2) const {
        for (std::size_t i = 0; i < phi1.size(); ++i) {
            const Complex a = phi1[i];
            const Complex b = phi2[i];
            phi1[i] = m11[i] * a + m12[i] * b;
            phi2[i] = m21[i] * a + m22[i] * b;
        }
    }
};

} // namespace detail

/// Strang-split unitary propagation of the two-channel system under
/// H = P^2/2M + V(X) + lambda(X, t) . sigma.
///
/// Each step is half-kick / kinetic / half-kick; the kick is the exact 2x2
/// matrix exponential per grid point and the kinetic factor is applied
/// spectrally, so every factor is unitary and the scheme is second order in
/// dt (and exactly time-reversible for time-independent couplings). Channel
/// norms are recorded every record_every steps; total-norm drift beyond 1e-8
/// aborts with NormDriftExceeded.
inline EvolveResult evolve(TwoChannelState& state, const CouplingSpec& spec,
                           const GridSpec& grid, double dt, std::size_t n_steps,
                           std::size_t record_every = 1, bool keep_snapshots = false) {
    static constexpr double kNormDriftTolerance = 1e-8;
    static constexpr double kEdgeAmplitudeBound = 1e-10;

    if (dt == 0.0 || !std::isfinite(dt))
        throw InvalidArgument("dt must be nonzero and finite");
    if (record_every < 1 || n_steps % record_every != 0)
        throw InvalidArgument("record_every must divide n_steps");
    if (state.n_points() != grid.n_points)
        throw InvalidArgument("state and grid sizes differ");

    const std::size_t n = grid.n_points;
    const Fft fft(n);

    std::vector<Complex> kinetic(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = grid.k(i);
        const double angle = -grid.hbar * k * k * dt / (2.0 * grid.mass);
        kinetic[i] = {std::cos(angle), std::sin(angle)};
    }

    const bool static_coupling = !spec.time_dependent();
    detail::KickTable kick_a, kick_b;
    if (static_coupling) kick_a.build(spec, grid, state.t(), 0.5 * dt);

    EvolveResult result;
    result.series.n_channels = 2;
    result.series.dt = dt * double(record_every);
    result.series.t0 = state.t();

    const double initial_norm = state.total_norm();

    auto record = [&](std::size_t step_index) {
        const double p1 = state.channel_norm(0);
        const double p2 = state.channel_norm(1);
        const double total = p1 + p2;
        result.series.append({p1, p2});
        result.total_norm.push_back(total);
        const double edge = std::max(std::max(std::abs(state.phi1().front()),
                                              std::abs(state.phi1().back())),
                                     std::max(std::abs(state.phi2().front()),
                                              std::abs(state.phi2().back())));
        result.max_edge_amplitude = std::max(result.max_edge_amplitude, edge);
        if (edge > kEdgeAmplitudeBound) result.edge_flagged = true;
        if (keep_snapshots) {
            result.snapshot_times.push_back(state.t());
            result.snapshots.push_back(state);
        }
        if (std::abs(total - initial_norm) > kNormDriftTolerance)
            throw NormDriftExceeded("norm drift " + std::to_string(total - initial_norm) +
                                    " at t = " + std::to_string(state.t()) + " (step " +
                                    std::to_string(step_index) + ")");
    };

    record(0);

    auto kinetic_step = [&](std::vector<Complex>& phi) {
        fft.forward(phi);
        for (std::size_t i = 0; i < n; ++i) phi[i] *= kinetic[i];
        fft.inverse(phi);
    };

    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t = state.t();
        const detail::KickTable* first = &kick_a;
        const detail::KickTable* second = &kick_a;
        if (!static_coupling) {
            kick_a.build(spec, grid, t + 0.25 * dt, 0.5 * dt);
            kick_b.build(spec, grid, t + 0.75 * dt, 0.5 * dt);
            second = &kick_b;
        }
        first->apply(state.phi1(), state.phi2());
        kinetic_step(state.phi1());
        kinetic_step(state.phi2());
        second->apply(state.phi1(), state.phi2());
        state.set_t(t + dt);
        if ((s + 1) % record_every == 0) record(s + 1);
    }
    return result;
}

/// Closed-form two-level solution for a spatially constant lambda_x coupling:
/// p_1(t) = |cos(lambda t / hbar) c1 - i sin(lambda t / hbar) c2|^2.
inline double rabi_p1(Complex c1, Complex c2, double lambda, double hbar, double t) {
    const double a = lambda * t / hbar;
    const Complex amp = std::cos(a) * c1 - Complex{0.0, 1.0} * std::sin(a) * c2;
    return std::norm(amp);
}

} // namespace qreduce
