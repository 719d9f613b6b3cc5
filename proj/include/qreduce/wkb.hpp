#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "qreduce/errors.hpp"
#include "qreduce/quantum.hpp"

namespace qreduce {

/// Amplitude-phase view of one channel: phi = A exp(i S / hbar) at every
/// masked point, with S unwrapped along mask-connected segments.
struct WkbView {
    std::vector<double> amplitude;
    std::vector<double> phase; // action units; meaningful only where masked
    std::vector<std::uint8_t> mask;
    std::size_t masked_points = 0;
};

/// Per-channel classicality-breaking measure: the masked-L2 magnitude of the
/// oscillating coupling source against the amplitude-transport magnitude.
struct WkbChannelReport {
    double source_l2 = 0.0;           // |sum_k (lambda.sigma)_jk e^{i(S_k-S_j)/hbar} A_k|
    double transport_source_l2 = 0.0; // the 1/hbar-scaled imaginary part of the above
    double transport_l2 = 0.0;        // |dA/dt + grad A . grad S / M|
    double breaking_ratio = 0.0;      // transport_source_l2 / transport_l2
    std::size_t masked_points = 0;
};

inline WkbView wkb_decompose(const std::vector<Complex>& phi, double hbar,
                             double amplitude_threshold) {
    const std::size_t n = phi.size();
    WkbView view;
    view.amplitude.resize(n);
    view.phase.assign(n, 0.0);
    view.mask.assign(n, 0);

    double max_amp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        view.amplitude[i] = std::abs(phi[i]);
        max_amp = std::max(max_amp, view.amplitude[i]);
    }
    if (!(amplitude_threshold > 0.0) || !(amplitude_threshold < max_amp))
        throw EmptyMask("amplitude threshold outside (0, max amplitude = " +
                        std::to_string(max_amp) + ")");

    const double two_pi = 2.0 * 3.141592653589793238462643383279502884;
    bool in_segment = false;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (view.amplitude[i] < amplitude_threshold) {
            in_segment = false;
            continue;
        }
        view.mask[i] = 1;
        ++view.masked_points;
        double theta = std::arg(phi[i]);
        if (in_segment) {
            // Shift by whole turns to stay closest to the previous point.
            theta += two_pi * std::round((prev - theta) / two_pi);
        }
        view.phase[i] = hbar * theta;
        prev = theta;
        in_segment = true;
    }
    return view;
}

namespace detail {

/// Central difference on the grid; one-sided is never needed because callers
/// only read interior points whose neighbors are masked.
inline double central_diff(const std::vector<double>& f, std::size_t i, double dx) {
    return (f[i + 1] - f[i - 1]) / (2.0 * dx);
}

} // namespace detail

/// Decomposes both channels as A exp(iS/hbar) and compares the oscillating
/// coupling source of the amplitude-transport balance against the transport
/// magnitude |dA_j/dt + grad A_j . grad S_j / M|, aggregated as a masked L2
/// ratio. The time derivative of A is taken along the source-free flow (the
/// diagonal part of the coupling only, i.e. the classical trajectories of
/// S_j): with the coupled derivative the balance is an identity and the
/// ratio would sit at 1 whenever the source dominates. A large ratio signals
/// classicality breaking; it vanishes for diagonal (pointer) couplings and
/// grows with 1/hbar otherwise.
inline std::vector<WkbChannelReport> wkb_diagnostic(const TwoChannelState& state,
                                                    const CouplingSpec& spec,
                                                    const GridSpec& grid,
                                                    double amplitude_threshold,
                                                    double fd_dt = 1e-4) {
    if (state.n_points() != grid.n_points)
        throw InvalidArgument("state and grid sizes differ");
    if (!(fd_dt > 0.0))
        throw InvalidArgument("fd_dt must be positive");

    const std::size_t n = grid.n_points;
    const double dx = grid.dx();
    const double hbar = grid.hbar;

    // A(t +- fd_dt) along the transport flow; lambda_x / lambda_y are the
    // oscillating source being measured, so they are switched off here.
    CouplingSpec transport_spec = spec;
    transport_spec.lambda_x = CouplingField{};
    transport_spec.lambda_y = CouplingField{};
    TwoChannelState forward = state;
    TwoChannelState backward = state;
    evolve(forward, transport_spec, grid, fd_dt, 1, 1);
    evolve(backward, transport_spec, grid, -fd_dt, 1, 1);

    std::vector<WkbChannelReport> reports(2);
    for (std::size_t channel = 0; channel < 2; ++channel) {
        const auto& phi_j = state.phi(channel);
        const auto& phi_k = state.phi(1 - channel);
        const WkbView view = wkb_decompose(phi_j, hbar, amplitude_threshold);

        const auto& phi_fwd = forward.phi(channel);
        const auto& phi_bwd = backward.phi(channel);

        const double sign_z = channel == 0 ? 1.0 : -1.0;

        double source_sq = 0.0, tsource_sq = 0.0, transport_sq = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (!view.mask[i] || !view.mask[i - 1] || !view.mask[i + 1]) continue;
            const double x = grid.x(i);
            const double t = state.t();
            const double lx = spec.lambda_x(x, t);
            const double ly = spec.lambda_y(x, t);
            const double lz = spec.lambda_z(x, t);

            // (lambda.sigma phi)_j expressed with e^{-i S_j / hbar} pulled out:
            // sum_k (lambda.sigma)_jk e^{i(S_k - S_j)/hbar} A_k
            //   = [(lambda.sigma)_jj phi_j + (lambda.sigma)_jk phi_k] conj(phi_j)/A_j
            const Complex off = channel == 0 ? Complex{lx, -ly} : Complex{lx, ly};
            const Complex coupled = sign_z * lz * phi_j[i] + off * phi_k[i];
            const double amp = view.amplitude[i];
            const Complex source = coupled * std::conj(phi_j[i]) / amp;

            const double da_dt =
                (std::abs(phi_fwd[i]) - std::abs(phi_bwd[i])) / (2.0 * fd_dt);
            const double grad_a = detail::central_diff(view.amplitude, i, dx);
            const double grad_s = detail::central_diff(view.phase, i, dx);
            const double transport = da_dt + grad_a * grad_s / grid.mass;

            source_sq += std::norm(source) * dx;
            tsource_sq += (source.imag() / hbar) * (source.imag() / hbar) * dx;
            transport_sq += transport * transport * dx;
            ++used;
        }
        if (used == 0)
            throw EmptyMask("no interior point with a fully masked neighborhood");

        WkbChannelReport& rep = reports[channel];
        rep.masked_points = used;
        rep.source_l2 = std::sqrt(source_sq);
        rep.transport_source_l2 = std::sqrt(tsource_sq);
        rep.transport_l2 = std::sqrt(transport_sq);
        if (rep.transport_l2 > 0.0)
            rep.breaking_ratio = rep.transport_source_l2 / rep.transport_l2;
        else
            rep.breaking_ratio = rep.transport_source_l2 > 0.0
                                     ? std::numeric_limits<double>::infinity()
                                     : 0.0;
    }
    return reports;
}

} // namespace qreduce
