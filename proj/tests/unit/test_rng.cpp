#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "levylmm/rng.hpp"

using namespace levylmm;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 known-answer test suite.
    auto r = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r[0] == 0x6627e8d5u);
    CHECK(r[1] == 0xe169c58du);
    CHECK(r[2] == 0xbc57ac4cu);
    CHECK(r[3] == 0x9b00dbd8u);

    r = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                          {0xffffffffu, 0xffffffffu});
    CHECK(r[0] == 0x408f276du);
    CHECK(r[1] == 0x41c83b0eu);
    CHECK(r[2] == 0xa20bc7c6u);
    CHECK(r[3] == 0x6d5451fdu);

    r = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          {0xa4093822u, 0x299f31d0u});
    CHECK(r[0] == 0xd16cfe09u);
    CHECK(r[1] == 0x94fdccebu);
    CHECK(r[2] == 0x5001e420u);
    CHECK(r[3] == 0x24126ea1u);
}

TEST_CASE("inverse normal cdf round-trips against erfc") {
    for (double p : {1e-12, 1e-6, 0.02425, 0.1, 0.25, 0.5, 0.75, 0.9, 0.999999, 1 - 1e-12}) {
        const double x = inverse_normal_cdf(p);
        const double back = 0.5 * std::erfc(-x / std::sqrt(2.0));
        CHECK(std::abs(back - p) <= 1e-14 * std::max(p, 1.0 - p) + 1e-16);
    }
    CHECK(inverse_normal_cdf(0.5) == Catch::Approx(0.0).margin(1e-15));
    CHECK(inverse_normal_cdf(0.975) == Catch::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("path streams are pure functions of (seed, path, step, slot)") {
    PathStream s1(42, 7), s2(42, 7), s3(42, 8), s4(43, 7);
    CHECK(s1.uniform_pair(3, 0) == s2.uniform_pair(3, 0));
    CHECK(s1.uniform_pair(3, 0) != s3.uniform_pair(3, 0));
    CHECK(s1.uniform_pair(3, 0) != s4.uniform_pair(3, 0));
    CHECK(s1.uniform_pair(3, 0) != s1.uniform_pair(3, 1));
    CHECK(s1.uniform_pair(3, 0) != s1.uniform_pair(4, 0));

    const auto u = s1.uniform_pair(0, 0);
    CHECK(u[0] > 0.0);
    CHECK(u[0] < 1.0);
    CHECK(u[1] > 0.0);
    CHECK(u[1] < 1.0);
}

TEST_CASE("uniforms look uniform") {
    PathStream s(2024, 0);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto u = s.uniform_pair(i, 0);
        sum += u[0] + u[1];
        sumsq += u[0] * u[0] + u[1] * u[1];
    }
    const double mean = sum / (2 * n);
    const double var = sumsq / (2 * n) - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.002);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}
