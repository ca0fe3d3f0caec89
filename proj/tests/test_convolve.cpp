#include <doctest.h>

#include "photonstat/numerics/convolve.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <stdexcept>

using namespace photonstat::numerics;

namespace {

SampledProfile gauss(double sigma, double step, double half) {
    SampledProfile p;
    p.step = step;
    const int n = static_cast<int>(std::lround(half / step));
    p.origin = -n * step;
    for (int i = 0; i <= 2 * n; ++i) {
        const double x = p.x(static_cast<std::size_t>(i));
        p.values.push_back(std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI)));
    }
    return p;
}

}  // namespace

TEST_CASE("gaussian variances add and area is kept") {
    const auto a = gauss(1.0, 0.02, 8), b = gauss(1.5, 0.02, 12);
    const auto c = convolve_profiles(a, b);
    CHECK(c.values.size() == a.values.size() + b.values.size() - 1);
    CHECK(c.origin == doctest::Approx(a.origin + b.origin));
    CHECK(c.area() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fwhm(c) == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * std::sqrt(3.25)).epsilon(1e-3));
}

TEST_CASE("commutative and associative") {
    const auto a = gauss(0.5, 0.05, 5), b = gauss(1.0, 0.05, 8), c = gauss(0.8, 0.05, 6);
    const auto ab = convolve_profiles(a, b), ba = convolve_profiles(b, a);
    REQUIRE(ab.values.size() == ba.values.size());
    const double peak = *std::max_element(ab.values.begin(), ab.values.end());
    for (std::size_t i = 0; i < ab.values.size(); ++i) CHECK(std::abs(ab.values[i] - ba.values[i]) <= 1e-6 * peak);
    const auto l = convolve_profiles(ab, c), r = convolve_profiles(a, convolve_profiles(b, c));
    REQUIRE(l.values.size() == r.values.size());
    for (std::size_t i = 0; i < l.values.size(); ++i) CHECK(std::abs(l.values[i] - r.values[i]) <= 1e-6 * peak);
}

TEST_CASE("rejections") {
    auto a = gauss(1.0, 0.1, 8), b = gauss(1.0, 0.05, 8);
    CHECK_THROWS_AS(convolve_profiles(a, b), std::invalid_argument);
    auto cut = gauss(1.0, 0.1, 1.0);  // does not decay at the edges
    CHECK_THROWS_AS(convolve_profiles(cut, a), std::invalid_argument);
}

TEST_CASE("kernels and same-mode convolution") {
    const auto k = gaussian_kernel(2.5);
    CHECK(k.size() % 2 == 1);
    CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0));
    CHECK(gaussian_kernel(0.0) == std::vector<double>{1.0});

    std::vector<double> s(50, 0.0);
    s[20] = 1.0;
    const auto out = convolve_same(s, k);
    CHECK(out.size() == s.size());
    CHECK(std::accumulate(out.begin(), out.end(), 0.0) == doctest::Approx(1.0));
    CHECK(out[20] == doctest::Approx(k[k.size() / 2]));
    CHECK(convolve_same(s, std::vector<double>{1.0}) == s);
}
