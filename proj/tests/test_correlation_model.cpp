#include <catch2/catch_amalgamated.hpp>

#include "qreduce/correlation_model.hpp"
#include "qreduce/norm_vector.hpp"

using qreduce::CorrelationModel;
using qreduce::NormVector;

TEST_CASE("constant model returns the base coefficients") {
    const auto m = CorrelationModel::constant({{0.0, 2.5}, {2.5, 0.0}});
    const NormVector p = NormVector::validated({0.4, 0.6});
    REQUIRE(m.evaluate(0, 1, p, 0.0) == 2.5);
    REQUIRE(m.evaluate(1, 0, p, 123.0) == 2.5);
    REQUIRE(m.channels() == 2);
}

TEST_CASE("base matrix validation") {
    REQUIRE_THROWS_AS(CorrelationModel::constant({{0.0, 1.0}, {2.0, 0.0}}),
                      qreduce::InvalidArgument); // asymmetric
    REQUIRE_THROWS_AS(CorrelationModel::constant({{0.5, 1.0}, {1.0, 0.0}}),
                      qreduce::InvalidArgument); // nonzero diagonal
    REQUIRE_THROWS_AS(CorrelationModel::constant({{0.0, -1.0}, {-1.0, 0.0}}),
                      qreduce::InvalidArgument); // negative
    REQUIRE_THROWS_AS(CorrelationModel::constant({{0.0}}), qreduce::InvalidArgument);
}

TEST_CASE("bilinear model vanishes on the simplex boundary") {
    const auto m = CorrelationModel::bilinear(2, 3.0);
    const NormVector interior = NormVector::validated({0.25, 0.75});
    REQUIRE(m.evaluate(0, 1, interior, 0.0) == Catch::Approx(3.0 * 0.25 * 0.75));
    const NormVector vertex = NormVector::validated({1.0, 0.0});
    REQUIRE(m.evaluate(0, 1, vertex, 0.0) == 0.0);
}

TEST_CASE("time ramp grows linearly and saturates") {
    const auto m = CorrelationModel::time_ramp({{0.0, 2.0}, {2.0, 0.0}}, 4.0);
    const NormVector p = NormVector::validated({0.5, 0.5});
    REQUIRE(m.evaluate(0, 1, p, 0.0) == 0.0);
    REQUIRE(m.evaluate(0, 1, p, 1.0) == Catch::Approx(0.5));
    REQUIRE(m.evaluate(0, 1, p, 4.0) == Catch::Approx(2.0));
    REQUIRE(m.evaluate(0, 1, p, 400.0) == Catch::Approx(2.0));
}

TEST_CASE("uniform constant helper zeroes the diagonal") {
    const auto m = CorrelationModel::constant_uniform(3, 1.5);
    const NormVector p = NormVector::validated({0.2, 0.3, 0.5});
    REQUIRE(m.evaluate(0, 2, p, 0.0) == 1.5);
    REQUIRE(m.evaluate(1, 2, p, 0.0) == 1.5);
}
