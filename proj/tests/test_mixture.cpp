#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qreduce/diffusion.hpp"
#include "qreduce/mixture.hpp"

using namespace qreduce;

namespace {

PathSeries constant_series(double p1, std::size_t n = 101, double dt = 1e-3) {
    PathSeries s;
    s.n_channels = 2;
    s.dt = dt;
    for (std::size_t i = 0; i < n; ++i) s.append({p1, 1.0 - p1});
    return s;
}

} // namespace

TEST_CASE("a single component passes through unchanged") {
    const PathSeries s = constant_series(0.3);
    const auto ensemble = MixtureEnsemble::validated({{1.0, s}});
    const PathSeries combined = combine_norms(ensemble);
    REQUIRE(combined.values == s.values);
}

TEST_CASE("norms combine convexly") {
    const auto even = MixtureEnsemble::validated(
        {{0.5, constant_series(0.2)}, {0.5, constant_series(0.6)}});
    REQUIRE(combine_norms(even).at(0, 0) == Catch::Approx(0.4));

    const auto skewed = MixtureEnsemble::validated(
        {{0.25, constant_series(0.0)}, {0.75, constant_series(1.0)}});
    REQUIRE(combine_norms(skewed).at(0, 0) == Catch::Approx(0.75));
}

TEST_CASE("combined norms sum to one per time point") {
    const auto ensemble = MixtureEnsemble::validated(
        {{0.25, constant_series(0.1)}, {0.75, constant_series(0.8)}});
    const PathSeries combined = combine_norms(ensemble);
    for (std::size_t i = 0; i < combined.n_samples(); ++i)
        REQUIRE(combined.at(i, 0) + combined.at(i, 1) ==
                Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("combining commutes with time restriction") {
    const auto model = CorrelationModel::constant_uniform(2, 1.0);
    RandomStream r1 = RandomStream::substream(5, 0);
    RandomStream r2 = RandomStream::substream(5, 1);
    const PathSeries a = run_path(NormVector::validated({0.5, 0.5}), model, 1e-5, 101, r1);
    const PathSeries b = run_path(NormVector::validated({0.4, 0.6}), model, 1e-5, 101, r2);
    const auto ensemble = MixtureEnsemble::validated({{0.3, a}, {0.7, b}});

    const PathSeries combined_then_sliced = combine_norms(ensemble).slice(10, 60);
    const auto sliced_ensemble =
        MixtureEnsemble::validated({{0.3, a.slice(10, 60)}, {0.7, b.slice(10, 60)}});
    const PathSeries sliced_then_combined = combine_norms(sliced_ensemble);
    REQUIRE(combined_then_sliced.values == sliced_then_combined.values);
}

TEST_CASE("the worked variance combination is exact") {
    // Component variances (4e-4, 0) with weights (0.25, 0.75) combine to 1e-4.
    REQUIRE(combine_component_variances({0.25, 0.75}, {4e-4, 0.0}) == 1e-4);

    // Series-level: increments of exactly +-2^-6 give variance 2^-12 and the
    // quarter weight scales it exactly.
    const double a = 0.015625;
    PathSeries osc;
    osc.n_channels = 2;
    osc.dt = 1e-3;
    for (int i = 0; i < 201; ++i) {
        const double p1 = (i % 2 == 0) ? 0.5 : 0.5 + a;
        osc.append({p1, 1.0 - p1});
    }
    const auto ensemble =
        MixtureEnsemble::validated({{0.25, osc}, {0.75, constant_series(0.4, 201)}});
    const MixtureVariance v = combine_fluctuation_variance(ensemble, 1e-3);
    REQUIRE(v.per_component[0][0] == a * a);
    REQUIRE(v.per_component[1][0] == 0.0);
    REQUIRE(v.combined[0] == 0.25 * (a * a));
}

TEST_CASE("single component combination is the component variance") {
    const auto model = CorrelationModel::constant_uniform(2, 1.0);
    RandomStream rng(77);
    const PathSeries s =
        run_path(NormVector::validated({0.5, 0.5}), model, 1e-6, 2001, rng);
    const auto ensemble = MixtureEnsemble::validated({{1.0, s}});
    const MixtureVariance v = combine_fluctuation_variance(ensemble, 1e-5);
    REQUIRE(v.combined[0] == Catch::Approx(v.per_component[0][0]));
}

TEST_CASE("independent equal-variance components combine to the shared variance") {
    const auto model = CorrelationModel::constant_uniform(2, 1.0);
    RandomStream r1 = RandomStream::substream(99, 0);
    RandomStream r2 = RandomStream::substream(99, 1);
    const NormVector p0 = NormVector::validated({0.5, 0.5});
    const PathSeries s1 = run_path(p0, model, 1e-6, 20001, r1);
    const PathSeries s2 = run_path(p0, model, 1e-6, 20001, r2);
    const auto ensemble = MixtureEnsemble::validated({{0.25, s1}, {0.75, s2}});
    const MixtureVariance v = combine_fluctuation_variance(ensemble, 1e-5);
    const double want = 1e-5; // A dt over the increment interval, A = 1
    const std::size_t m = (s1.n_samples() - 1) / v.window;
    const double se = std::sqrt(2.0 / double(m)) * want;
    REQUIRE(std::abs(v.combined[0] - want) < 4.0 * se);
}

TEST_CASE("ensemble validation") {
    REQUIRE_THROWS_AS(MixtureEnsemble::validated({}), InvalidArgument);
    REQUIRE_THROWS_AS(
        MixtureEnsemble::validated({{0.6, constant_series(0.5)},
                                    {0.6, constant_series(0.5)}}),
        NotNormalized);
    REQUIRE_THROWS_AS(
        MixtureEnsemble::validated({{0.5, constant_series(0.5, 101)},
                                    {0.5, constant_series(0.5, 77)}}),
        MismatchedGrids);
    const auto ok = MixtureEnsemble::validated(
        {{0.5, constant_series(0.5)}, {0.5, constant_series(0.1)}});
    REQUIRE_THROWS_AS(combine_fluctuation_variance(ok, 0.0), InvalidArgument);
    REQUIRE_THROWS_AS(combine_fluctuation_variance(ok, 1.0), SeriesTooShort);
}
