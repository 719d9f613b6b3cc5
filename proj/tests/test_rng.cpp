#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qreduce/rng.hpp"

using qreduce::RandomStream;

TEST_CASE("substreams are reproducible and distinct") {
    RandomStream a = RandomStream::substream(42, 7);
    RandomStream b = RandomStream::substream(42, 7);
    RandomStream c = RandomStream::substream(42, 8);
    bool all_equal = true;
    bool any_differ = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_differ = any_differ || va != c.next_u64();
    }
    REQUIRE(all_equal);
    REQUIRE(any_differ);
}

TEST_CASE("uniform draws stay inside the open unit interval") {
    RandomStream rng(123);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_unit();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normal draws have unit variance and zero mean") {
    RandomStream rng(2024);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_normal();
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    REQUIRE(std::abs(mean) < 4.0 / std::sqrt(double(n)));
    REQUIRE(std::abs(var - 1.0) < 0.02);
}
