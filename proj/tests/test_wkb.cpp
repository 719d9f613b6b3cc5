#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qreduce/quantum.hpp"
#include "qreduce/wkb.hpp"

using namespace qreduce;

namespace {

TwoChannelState evolved_state(const CouplingSpec& spec, const GridSpec& grid,
                              std::size_t steps = 400) {
    TwoChannelState state =
        init_state({0.6, 0.0}, {0.0, 0.8}, {0.0, 1.0, 0.5}, grid);
    evolve(state, spec, grid, 1e-3, steps, steps);
    return state;
}

double max_amplitude(const TwoChannelState& state) {
    double m = 0.0;
    for (const auto& c : state.phi1()) m = std::max(m, std::abs(c));
    for (const auto& c : state.phi2()) m = std::max(m, std::abs(c));
    return m;
}

} // namespace

TEST_CASE("decomposition reproduces the wavefunction on the mask") {
    const GridSpec grid = GridSpec::validated(-24.0, 24.0, 1024);
    CouplingSpec spec;
    spec.potential = {PotentialSpec::Kind::harmonic, 1.0};
    const TwoChannelState state = evolved_state(spec, grid);

    const double threshold = 1e-6 * max_amplitude(state);
    const WkbView view = wkb_decompose(state.phi1(), grid.hbar, threshold);
    REQUIRE(view.masked_points > 100);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        if (!view.mask[i]) continue;
        const Complex rebuilt =
            view.amplitude[i] *
            Complex{std::cos(view.phase[i] / grid.hbar), std::sin(view.phase[i] / grid.hbar)};
        worst = std::max(worst, std::abs(rebuilt - state.phi1()[i]));
    }
    REQUIRE(worst < 1e-10);
}

TEST_CASE("pointer coupling produces no transport source") {
    const GridSpec grid = GridSpec::validated(-24.0, 24.0, 1024);
    CouplingSpec spec;
    spec.potential = {PotentialSpec::Kind::harmonic, 1.0};
    spec.lambda_z = CouplingField::linear(0.4, 0.15);
    const TwoChannelState state = evolved_state(spec, grid);
    const auto reports =
        wkb_diagnostic(state, spec, grid, 1e-6 * max_amplitude(state));
    for (const auto& rep : reports) {
        REQUIRE(rep.breaking_ratio < 1e-8);
        REQUIRE(rep.source_l2 > 0.0); // the classical Hamiltonian shift survives
    }
}

TEST_CASE("transverse coupling breaks classicality and scales with 1/hbar") {
    // A pointer-prepared (still classical) state probed by a transverse
    // coupling: the source-to-transport ratio grows as hbar shrinks.
    auto ratio_at = [](double hbar) {
        const GridSpec grid = GridSpec::validated(-24.0, 24.0, 1024, 1.0, hbar);
        CouplingSpec pointer;
        pointer.potential = {PotentialSpec::Kind::harmonic, 1.0};
        pointer.lambda_z = CouplingField::linear(0.3, 0.2);
        TwoChannelState state =
            init_state({0.6, 0.0}, {0.0, 0.8}, {0.5, 1.0, 0.0}, grid);
        evolve(state, pointer, grid, 1e-3, 500, 500);

        CouplingSpec probed = pointer;
        probed.lambda_x = CouplingField::constant(0.4);
        const auto reports =
            wkb_diagnostic(state, probed, grid, 1e-6 * max_amplitude(state));
        return reports[0].breaking_ratio;
    };
    // Least-squares slope of log(ratio) against log(1/hbar): the phase of
    // the oscillating source adds O(1) wiggle, but the trend is ~ 1/hbar.
    const std::vector<double> hbars = {1.0, 0.5, 0.25, 0.125, 0.0625};
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double first = 0.0, last = 0.0;
    for (double hbar : hbars) {
        const double r = ratio_at(hbar);
        REQUIRE(r > 0.0);
        if (hbar == hbars.front()) first = r;
        last = r;
        const double x = std::log(1.0 / hbar);
        const double y = std::log(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = double(hbars.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    REQUIRE(slope > 0.6);
    REQUIRE(last > 4.0 * first);
}

TEST_CASE("near-zero amplitude regions are excluded but the measure is defined") {
    const GridSpec grid = GridSpec::validated(-24.0, 24.0, 1024);
    CouplingSpec spec;
    spec.potential = {PotentialSpec::Kind::harmonic, 1.0};
    spec.lambda_x = CouplingField::constant(0.3);
    const TwoChannelState state = evolved_state(spec, grid);
    const auto reports =
        wkb_diagnostic(state, spec, grid, 1e-4 * max_amplitude(state));
    for (const auto& rep : reports) {
        REQUIRE(rep.masked_points > 0);
        REQUIRE(rep.masked_points < grid.n_points); // the tails fell below threshold
        REQUIRE(std::isfinite(rep.breaking_ratio));
    }
}

TEST_CASE("a threshold above the peak amplitude is rejected") {
    const GridSpec grid = GridSpec::validated(-24.0, 24.0, 1024);
    CouplingSpec spec;
    spec.potential = {PotentialSpec::Kind::harmonic, 1.0};
    const TwoChannelState state = evolved_state(spec, grid, 10);
    REQUIRE_THROWS_AS(
        wkb_diagnostic(state, spec, grid, 2.0 * max_amplitude(state)), EmptyMask);
}
