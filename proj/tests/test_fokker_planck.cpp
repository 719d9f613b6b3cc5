#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qreduce/fokker_planck.hpp"

using namespace qreduce;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("grid validation") {
    REQUIRE_THROWS_AS(FpGrid::validated(8, 0.5), InvalidArgument);
    REQUIRE_THROWS_AS(FpGrid::validated(64, 0.0), InvalidArgument);
    const FpGrid g = FpGrid::validated(100, 0.5);
    REQUIRE(g.dx() == Catch::Approx(0.01));
    REQUIRE(g.x_center(0) == Catch::Approx(0.005));
}

TEST_CASE("generator annihilates constants away from the boundary") {
    const FpGrid grid = FpGrid::validated(64, 0.5);
    const TridiagonalGenerator gen = build_generator(grid);
    const std::vector<double> ones(64, 1.0);
    const auto out = gen.apply(ones);
    for (std::size_t i = 1; i + 1 < out.size(); ++i) REQUIRE(out[i] == 0.0);
    REQUIRE(out.front() != 0.0); // absorbing rows lose mass
    REQUIRE(out.back() != 0.0);
}

TEST_CASE("smallest eigenvalue approaches D pi^2") {
    // n = 200, A = 1 (D = 1/2): pi^2 / 2 = 4.934802200544679.
    const FpGrid grid = FpGrid::validated(200, 0.5);
    const double lambda1 = smallest_eigenvalue(build_generator(grid));
    REQUIRE(lambda1 == Catch::Approx(kPi * kPi / 2.0).epsilon(0.01));
}

TEST_CASE("sine vector satisfies the eigen-relation to discretization error") {
    const FpGrid grid = FpGrid::validated(200, 0.5);
    const TridiagonalGenerator gen = build_generator(grid);
    std::vector<double> v(grid.n_cells);
    for (std::size_t i = 0; i < grid.n_cells; ++i) v[i] = std::sin(kPi * grid.x_center(i));
    const auto lv = gen.apply(v);
    const double target = grid.diffusion_coefficient * kPi * kPi;
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        worst = std::max(worst, std::abs(lv[i] + target * v[i]));
    // Leading error D pi^2 (pi dx)^2 / 12, with 2x headroom.
    const double dx = grid.dx();
    REQUIRE(worst > 0.0);
    REQUIRE(worst <= target * (kPi * dx) * (kPi * dx) / 6.0);
}

TEST_CASE("symmetric start splits evenly") {
    const FpGrid grid = FpGrid::validated(405, 0.5);
    const FpSolution sol = solve(grid, 0.5, 3.0, 1e-3);
    REQUIRE(sol.absorbed_mass_0() == Catch::Approx(0.5).margin(1e-3));
    REQUIRE(sol.absorbed_mass_1() == Catch::Approx(0.5).margin(1e-3));
}

TEST_CASE("asymmetric start splits by the initial coordinate") {
    const FpGrid grid = FpGrid::validated(405, 0.5);
    const FpSolution sol = solve(grid, 0.3, 5.0, 1e-3);
    REQUIRE(sol.absorbed_mass_1() == Catch::Approx(0.3).margin(1e-3));
    REQUIRE(sol.absorbed_mass_0() == Catch::Approx(0.7).margin(1e-3));
}

TEST_CASE("interior plus absorbed mass is conserved at every recorded time") {
    const FpGrid grid = FpGrid::validated(128, 0.5);
    const FpSolution sol = solve(grid, 0.37, 2.0, 1e-3);
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        const double total = sol.interior_mass_history[i] +
                             sol.absorbed_mass_0_history[i] +
                             sol.absorbed_mass_1_history[i];
        REQUIRE(total == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("densities stay nonnegative and absorbed masses grow") {
    const FpGrid grid = FpGrid::validated(128, 0.5);
    const FpSolution sol = solve(grid, 0.5, 1.0, 1e-3);
    REQUIRE(sol.clamped_cells == 0);
    for (const auto& density : sol.density_history)
        for (double d : density) REQUIRE(d >= 0.0);
    for (std::size_t i = 1; i < sol.times.size(); ++i) {
        REQUIRE(sol.absorbed_mass_0_history[i] >= sol.absorbed_mass_0_history[i - 1]);
        REQUIRE(sol.absorbed_mass_1_history[i] >= sol.absorbed_mass_1_history[i - 1]);
    }
}

TEST_CASE("explicit scheme matches and enforces its stability bound") {
    const FpGrid grid = FpGrid::validated(64, 0.5);
    const double bound = grid.dx() * grid.dx() / (2.0 * grid.diffusion_coefficient);
    REQUIRE_THROWS_AS(solve(grid, 0.5, 1.0, 2.0 * bound, FpScheme::explicit_euler),
                      UnstableStep);
    const FpSolution ex = solve(grid, 0.5, 1.0, 0.9 * bound, FpScheme::explicit_euler);
    const FpSolution cn = solve(grid, 0.5, 1.0, 0.9 * bound, FpScheme::crank_nicolson);
    REQUIRE(ex.absorbed_mass_0() == Catch::Approx(cn.absorbed_mass_0()).margin(1e-3));
}

TEST_CASE("survival decay rate matches the spectral gap") {
    const FpGrid grid = FpGrid::validated(405, 0.5);
    const FpSolution sol = solve(grid, 0.5, 3.0, 1e-3);
    const double rate = survival_decay_rate(sol);
    REQUIRE(rate == Catch::Approx(kPi * kPi / 2.0).epsilon(0.02));
}

TEST_CASE("doubling A halves the decay time") {
    const FpSolution slow = solve(FpGrid::validated(201, 0.5), 0.5, 3.0, 1e-3);
    const FpSolution fast = solve(FpGrid::validated(201, 1.0), 0.5, 1.5, 1e-3);
    const double t_slow = 1.0 / survival_decay_rate(slow);
    const double t_fast = 1.0 / survival_decay_rate(fast);
    REQUIRE(t_fast == Catch::Approx(0.5 * t_slow).epsilon(0.02));
}

TEST_CASE("insufficient decay is reported") {
    const FpGrid grid = FpGrid::validated(64, 0.5);
    const FpSolution sol = solve(grid, 0.5, 0.05, 1e-4);
    REQUIRE(sol.final_interior_mass() > 0.1);
    REQUIRE_THROWS_AS(survival_decay_rate(sol), InsufficientDecay);
}

TEST_CASE("absorbed mass at a fixed time converges at second order") {
    // The terminal split is grid-exact, so convergence is measured on the
    // time-resolved absorbed mass instead.
    auto absorbed_at = [](std::size_t n) {
        const FpGrid grid = FpGrid::validated(n, 0.5);
        const FpSolution sol = solve(grid, 0.31, 0.1, 1e-5);
        return sol.absorbed_mass_0();
    };
    const double coarse = absorbed_at(45);
    const double medium = absorbed_at(90);
    const double fine = absorbed_at(180);
    const double e1 = std::abs(coarse - medium);
    const double e2 = std::abs(medium - fine);
    REQUIRE(e1 > 1e-10);
    const double ratio = e1 / e2;
    REQUIRE(ratio > 2.5);
}

TEST_CASE("solver input validation") {
    const FpGrid grid = FpGrid::validated(64, 0.5);
    REQUIRE_THROWS_AS(solve(grid, 0.0, 1.0, 1e-3), InvalidArgument);
    REQUIRE_THROWS_AS(solve(grid, 1.0, 1.0, 1e-3), InvalidArgument);
    REQUIRE_THROWS_AS(solve(grid, 0.5, -1.0, 1e-3), InvalidArgument);
    REQUIRE_THROWS_AS(solve(grid, 0.5, 1.0, 0.0), InvalidArgument);
}
