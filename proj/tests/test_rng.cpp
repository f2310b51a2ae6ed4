#include <cmath>

#include "doctest.h"
#include "omw/rng.hpp"

using omw::PhiloxEngine;

TEST_SUITE("rng") {

TEST_CASE("philox4x32-10 known answers") {
    // reference vectors from the algorithm's published known-answer set
    const auto zero = PhiloxEngine::block({0u, 0u}, {0u, 0u, 0u, 0u});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const auto pi = PhiloxEngine::block({0xa4093822u, 0x299f31d0u},
                                        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("engine draws the block words in order") {
    PhiloxEngine e(0, 0);
    CHECK(e() == ((std::uint64_t{0xe169c58du} << 32) | 0x6627e8d5u));
    CHECK(e() == ((std::uint64_t{0x9b00dbd8u} << 32) | 0xbc57ac4cu));
}

TEST_CASE("streams and seeds separate") {
    PhiloxEngine a(1, 0), b(1, 1), c(2, 0), a2(1, 0);
    const auto va = a();
    CHECK(va != b());
    CHECK(va != c());
    CHECK(va == a2());
}

TEST_CASE("uniforms look uniform") {
    PhiloxEngine e(123, 0);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = e.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.005);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
}

}  // TEST_SUITE
