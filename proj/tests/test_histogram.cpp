#include <doctest.h>

#include "photonstat/numerics/histogram.hpp"

#include <vector>
#include <stdexcept>

using namespace photonstat::numerics;

TEST_CASE("symmetric bin index") {
    CHECK(symmetric_bin_index(0, 10) == 0);
    CHECK(symmetric_bin_index(4, 10) == 0);
    CHECK(symmetric_bin_index(5, 10) == 1);
    CHECK(symmetric_bin_index(-5, 10) == -1);
    CHECK(symmetric_bin_index(14, 10) == 1);
    CHECK(symmetric_bin_index(15, 10) == 2);
    for (std::int64_t d = -1000; d <= 1000; ++d) CHECK(symmetric_bin_index(-d, 7) == -symmetric_bin_index(d, 7));
}

TEST_CASE("uniform histogram") {
    UniformHistogram h(-1.0, 0.5, 4);
    CHECK(h.fill(-1.0));
    CHECK(h.fill(-0.51));
    CHECK(h.fill(0.99));
    CHECK_FALSE(h.fill(1.0));
    CHECK_FALSE(h.fill(-1.01));
    CHECK(h.counts == std::vector<std::uint64_t>{2, 0, 0, 1});
    CHECK(h.total() == 3);
    CHECK(h.center(0) == doctest::Approx(-0.75));
    CHECK_FALSE(h.bin_of(2.0).has_value());
}

TEST_CASE("mean and sample std") {
    const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
    const MeanStd m = mean_std(x);
    CHECK(m.n == 8);
    CHECK(m.mean == doctest::Approx(5.0));
    CHECK(m.std == doctest::Approx(2.138089935));
}
