#include <doctest.h>

#include "photonstat/numerics/rng.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

using namespace photonstat::numerics;

TEST_CASE("philox4x32-10 known answers") {
    using C = std::array<std::uint32_t, 4>;
    using K = std::array<std::uint32_t, 2>;
    CHECK(philox4x32_10(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("substreams are reproducible and distinct") {
    RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
        CHECK(x != d.next_u64());
    }
    CHECK(rng_substream(42, 7).next_u64() == RandomStream(42, 7).next_u64());
}

TEST_CASE("distribution moments") {
    RandomStream r(1, 0);
    const int n = 200000;
    double su = 0, se = 0, sn = 0, sn2 = 0, sp = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        se += r.exponential(3.0);
        const double z = r.normal(1.0, 2.0);
        sn += z;
        sn2 += z * z;
        sp += static_cast<double>(r.poisson(4.5));
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
    CHECK(se / n == doctest::Approx(3.0).epsilon(0.01));
    CHECK(sn / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(sn2 / n - (sn / n) * (sn / n) == doctest::Approx(4.0).epsilon(0.02));
    CHECK(sp / n == doctest::Approx(4.5).epsilon(0.01));
}

TEST_CASE("large-mean poisson and bounded integers") {
    RandomStream r(9, 1);
    double s = 0;
    for (int i = 0; i < 2000; ++i) s += static_cast<double>(r.poisson(1e6));
    CHECK(s / 2000 == doctest::Approx(1e6).epsilon(1e-4));
    CHECK(r.poisson(0.0) == 0);

    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto k = r.below(5);
        REQUIRE(k < 5);
        seen.insert(k);
    }
    CHECK(seen.size() == 5);
}
