#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qreduce/errors.hpp"

namespace qreduce {

/// Uniform cell-centered grid on (0, 1) for the two-channel reduction PDE
/// dP/dt = D d^2P/dx^2 with absorbing faces at x = 0 and x = 1. D carries the
/// 1/2-consistent convention D = A/2, so the PDE and the stochastic stepper
/// (var(dp_1) = A dt) describe the same process.
struct FpGrid {
    std::size_t n_cells = 0;
    double diffusion_coefficient = 0.0; // D, units 1/time

    static FpGrid validated(std::size_t n_cells, double diffusion_coefficient) {
        if (n_cells < 16)
            throw InvalidArgument("grid needs at least 16 cells");
        if (!(diffusion_coefficient > 0.0) || !std::isfinite(diffusion_coefficient))
            throw InvalidArgument("diffusion coefficient must be finite and positive");
        return FpGrid{n_cells, diffusion_coefficient};
    }

    double dx() const { return 1.0 / double(n_cells); }
    double x_center(std::size_t i) const { return (double(i) + 0.5) * dx(); }

    std::vector<double> x_centers() const {
        std::vector<double> xs(n_cells);
        for (std::size_t i = 0; i < n_cells; ++i) xs[i] = x_center(i);
        return xs;
    }
};

/// Symmetric tridiagonal generator: D times the second difference with
/// density pinned to zero at both faces (ghost value -P_0 / -P_{n-1}).
/// Interior diagonal is -2 D / dx^2, boundary rows -3 D / dx^2, off-diagonal
/// D / dx^2. The extra boundary loss 2 D / dx^2 per boundary cell is the
/// discrete absorption flux exported to the absorbed-mass accumulators.
struct TridiagonalGenerator {
    std::vector<double> diag;
    double off = 0.0;
    double boundary_loss_rate = 0.0; // 2 D / dx^2

    std::size_t size() const { return diag.size(); }

    std::vector<double> apply(const std::vector<double>& v) const {
        const std::size_t n = diag.size();
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * v[i];
            if (i > 0) s += off * v[i - 1];
            if (i + 1 < n) s += off * v[i + 1];
            out[i] = s;
        }
        return out;
    }
};

inline TridiagonalGenerator build_generator(const FpGrid& grid) {
    FpGrid::validated(grid.n_cells, grid.diffusion_coefficient);
    const double r = grid.diffusion_coefficient / (grid.dx() * grid.dx());
    TridiagonalGenerator g;
    g.diag.assign(grid.n_cells, -2.0 * r);
    g.diag.front() = -3.0 * r;
    g.diag.back() = -3.0 * r;
    g.off = r;
    g.boundary_loss_rate = 2.0 * r;
    return g;
}

namespace detail {

/// Thomas solve of (diag + shift) x = rhs with constant off-diagonal.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& diag, double off,
                                             std::vector<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0);
    double piv = diag[0];
    c[0] = off / piv;
    rhs[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - off * c[i - 1];
        c[i] = off / piv;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

} // namespace detail

/// Smallest eigenvalue of -generator (the spectral gap of the absorbing
/// interval), by inverse power iteration with a deterministic start vector.
inline double smallest_eigenvalue(const TridiagonalGenerator& g, double rel_tol = 1e-12,
                                  std::size_t max_iterations = 500) {
    const std::size_t n = g.size();
    std::vector<double> neg_diag(n);
    for (std::size_t i = 0; i < n; ++i) neg_diag[i] = -g.diag[i];

    std::vector<double> v(n, 1.0);
    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        std::vector<double> w = detail::solve_tridiagonal(neg_diag, -g.off, v);
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : w) x /= norm;
        // Rayleigh quotient of -L at w.
        const auto lw = g.apply(w);
        double num = 0.0;
        for (std::size_t i = 0; i < n; ++i) num -= w[i] * lw[i];
        if (it > 0 && std::abs(num - lambda) <= rel_tol * std::abs(num)) return num;
        lambda = num;
        v = std::move(w);
    }
    return lambda;
}

enum class FpScheme { crank_nicolson, explicit_euler };

/// Discretized density history with per-face absorbed masses.
struct FpSolution {
    std::vector<double> times;
    std::vector<std::vector<double>> density_history; // probability per unit x
    std::vector<double> interior_mass_history;
    std::vector<double> absorbed_mass_0_history; // cumulative, face x = 0
    std::vector<double> absorbed_mass_1_history; // cumulative, face x = 1
    double x0_effective = 0.0;
    double dx = 0.0;
    std::size_t clamped_cells = 0; // cells clipped below -1e-12 (diagnostic)

    double absorbed_mass_0() const { return absorbed_mass_0_history.back(); }
    double absorbed_mass_1() const { return absorbed_mass_1_history.back(); }
    double final_interior_mass() const { return interior_mass_history.back(); }
};

/// Evolves a unit point mass started at x0 to t_end, recording density
/// snapshots and cumulative absorbed masses.
///
/// The point mass is split linearly over the two cells bracketing x0 so that
/// its mean is exactly x0; a share falling within half a cell of a face goes
/// straight to that face's absorbed mass. Crank-Nicolson steps are preceded
/// by four implicit half-steps (Rannacher startup) to damp the point-mass
/// oscillations; flux accumulation uses the scheme-consistent stage average,
/// which keeps interior + absorbed mass conserved to rounding.
inline FpSolution solve(const FpGrid& grid, double x0, double t_end, double dt,
                        FpScheme scheme = FpScheme::crank_nicolson,
                        std::size_t record_every = 0) {
    FpGrid::validated(grid.n_cells, grid.diffusion_coefficient);
    if (!(x0 > 0.0) || !(x0 < 1.0))
        throw InvalidArgument("x0 must lie strictly inside (0, 1)");
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw InvalidArgument("t_end and dt must be positive");

    const std::size_t n = grid.n_cells;
    const double dx = grid.dx();
    const double D = grid.diffusion_coefficient;
    if (scheme == FpScheme::explicit_euler && dt > dx * dx / (2.0 * D))
        throw UnstableStep("explicit step above the bound dx^2 / (2 D) = " +
                           std::to_string(dx * dx / (2.0 * D)));

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    const double dt_actual = t_end / double(n_steps);
    if (record_every == 0) record_every = std::max<std::size_t>(1, n_steps / 200);

    const TridiagonalGenerator gen = build_generator(grid);

    FpSolution sol;
    sol.dx = dx;

    // Two-cell split of the point mass; out-of-range share is absorbed at t=0.
    std::vector<double> mass(n, 0.0);
    double absorbed0 = 0.0, absorbed1 = 0.0;
    {
        const double g = x0 / dx - 0.5;
        const double left = std::floor(g);
        const double frac = g - left;
        const auto il = static_cast<std::ptrdiff_t>(left);
        if (il < 0)
            absorbed0 += 1.0 - frac;
        else
            mass[static_cast<std::size_t>(il)] += 1.0 - frac;
        if (il + 1 >= static_cast<std::ptrdiff_t>(n))
            absorbed1 += frac;
        else
            mass[static_cast<std::size_t>(il + 1)] += frac;
        sol.x0_effective = x0;
    }

    auto record = [&](double t) {
        sol.times.push_back(t);
        std::vector<double> density(n);
        double interior = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            density[i] = mass[i] / dx;
            interior += mass[i];
        }
        sol.density_history.push_back(std::move(density));
        sol.interior_mass_history.push_back(interior);
        sol.absorbed_mass_0_history.push_back(absorbed0);
        sol.absorbed_mass_1_history.push_back(absorbed1);
    };
    record(0.0);

    // Implicit Euler stage: (I - h L) m' = m, flux taken at the new masses.
    auto implicit_stage = [&](double h) {
        std::vector<double> diag(n);
        for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 - h * gen.diag[i];
        mass = detail::solve_tridiagonal(diag, -h * gen.off, std::move(mass));
        absorbed0 += h * gen.boundary_loss_rate * mass.front();
        absorbed1 += h * gen.boundary_loss_rate * mass.back();
    };

    // Crank-Nicolson stage: (I - h/2 L) m' = (I + h/2 L) m, flux at the average.
    auto cn_stage = [&](double h) {
        const std::vector<double> lm = gen.apply(mass);
        std::vector<double> rhs(n), diag(n);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = mass[i] + 0.5 * h * lm[i];
            diag[i] = 1.0 - 0.5 * h * gen.diag[i];
        }
        std::vector<double> next = detail::solve_tridiagonal(diag, -0.5 * h * gen.off,
                                                             std::move(rhs));
        absorbed0 += h * gen.boundary_loss_rate * 0.5 * (mass.front() + next.front());
        absorbed1 += h * gen.boundary_loss_rate * 0.5 * (mass.back() + next.back());
        mass = std::move(next);
    };

    auto explicit_stage = [&](double h) {
        const std::vector<double> lm = gen.apply(mass);
        absorbed0 += h * gen.boundary_loss_rate * mass.front();
        absorbed1 += h * gen.boundary_loss_rate * mass.back();
        for (std::size_t i = 0; i < n; ++i) mass[i] += h * lm[i];
    };

    auto clamp_noise = [&] {
        for (double& m : mass) {
            if (m < 0.0) {
                if (m < -1e-12 * dx) ++sol.clamped_cells;
                m = 0.0;
            }
        }
    };

    for (std::size_t s = 0; s < n_steps; ++s) {
        if (scheme == FpScheme::explicit_euler) {
            explicit_stage(dt_actual);
        } else if (s < 2) {
            implicit_stage(0.5 * dt_actual);
            implicit_stage(0.5 * dt_actual);
        } else {
            cn_stage(dt_actual);
        }
        clamp_noise();
        const double t = double(s + 1) * dt_actual;
        if ((s + 1) % record_every == 0 || s + 1 == n_steps) record(t);
    }
    return sol;
}

/// Least-squares slope of log(interior mass) over the final third of the
/// recorded time range; requires the run to have decayed below mass 0.1.
inline double survival_decay_rate(const FpSolution& sol) {
    if (sol.times.size() < 3)
        throw InsufficientDecay("solution has too few recorded times");
    if (!(sol.final_interior_mass() < 0.1))
        throw InsufficientDecay("interior mass never dropped below 0.1");

    const double t_end = sol.times.back();
    const double t_from = t_end - (t_end - sol.times.front()) / 3.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        if (sol.times[i] < t_from) continue;
        const double mass = sol.interior_mass_history[i];
        if (mass <= 0.0) continue;
        const double x = sol.times[i];
        const double y = std::log(mass);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2)
        throw InsufficientDecay("not enough usable samples in the fit window");
    const double denom = double(m) * sxx - sx * sx;
    const double slope = (double(m) * sxy - sx * sy) / denom;
    return -slope;
}

} // namespace qreduce
