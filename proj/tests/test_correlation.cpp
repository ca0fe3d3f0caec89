#include <doctest.h>

#include "photonstat/acceptance/criteria.hpp"
#include "photonstat/errors.hpp"
#include "photonstat/mc/engine.hpp"
#include "photonstat/numerics/histogram.hpp"
#include "photonstat/numerics/rng.hpp"
#include "photonstat/tcspc/correlation.hpp"
#include "photonstat/tcspc/purity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace photonstat;
using namespace photonstat::tcspc;

namespace {

std::vector<std::uint64_t> random_stream(std::uint64_t seed, std::size_t n, std::uint64_t span) {
    numerics::RandomStream r(seed, 0);
    std::vector<std::uint64_t> v(n);
    for (auto& t : v) t = r.below(span);
    std::sort(v.begin(), v.end());
    return v;
}

// All-pairs reference.
std::vector<std::uint64_t> brute(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                 std::int64_t bw, std::int64_t window) {
    const std::int64_t k = window / bw;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(2 * k + 1), 0);
    for (auto ta : a) {
        for (auto tb : b) {
            const std::int64_t d = static_cast<std::int64_t>(tb) - static_cast<std::int64_t>(ta);
            const std::int64_t i = numerics::symmetric_bin_index(d, bw);
            if (i >= -k && i <= k) ++counts[static_cast<std::size_t>(i + k)];
        }
    }
    return counts;
}

}  // namespace

TEST_CASE("two-pointer sweep equals all-pairs counting") {
    const auto a = random_stream(1, 400, 1'000'000), b = random_stream(2, 500, 1'000'000);
    for (auto [bw, window] : {std::pair<std::int64_t, std::int64_t>{100, 5000}, {7, 300}, {1000, 1000}}) {
        const CorrelationHistogram h = correlate(a, b, bw, window);
        CHECK(h.counts == brute(a, b, bw, window));
        CHECK(h.half_bins == window / bw);
        CHECK(h.delay(0) == -static_cast<double>(h.half_bins * bw));
    }
}

TEST_CASE("swapping channels mirrors the histogram") {
    const auto a = random_stream(3, 2000, 5'000'000), b = random_stream(4, 2000, 5'000'000);
    const auto ab = correlate(a, b, 50, 20000), ba = correlate(b, a, 50, 20000);
    std::vector<std::uint64_t> rev(ba.counts.rbegin(), ba.counts.rend());
    CHECK(ab.counts == rev);
}

TEST_CASE("thread count does not change the result") {
    const auto a = random_stream(5, 50000, 100'000'000), b = random_stream(6, 50000, 100'000'000);
    CHECK(correlate(a, b, 100, 100000, std::nullopt, 1).counts == correlate(a, b, 100, 100000, std::nullopt, 3).counts);
}

TEST_CASE("input checks and csv") {
    const std::vector<std::uint64_t> unsorted{5, 3}, ok{1, 2};
    CHECK_THROWS_AS(correlate(unsorted, ok, 10, 100), std::invalid_argument);
    CHECK_THROWS_AS(correlate(ok, ok, 0, 100), std::invalid_argument);
    const auto h = correlate(ok, ok, 1, 2);
    CHECK(correlation_csv(h) == "delay_ps,counts\n-2,0\n-1,1\n0,2\n1,1\n2,0\n");
}

TEST_CASE("purity from a synthetic pulse train") {
    CorrelationHistogram h;
    h.bin_width = 100;
    h.half_bins = 1100;
    h.counts.assign(2201, 0);
    h.rep_period = 10000.0;
    auto at = [&](std::int64_t delay) -> std::uint64_t& { return h.counts[static_cast<std::size_t>(delay / 100 + 1100)]; };
    for (int m = -10; m <= 10; ++m) {
        at(m * 10000 - 100) += m == 0 ? 1 : 25;
        at(m * 10000) += m == 0 ? 3 : 50;
        at(m * 10000 + 100) += m == 0 ? 1 : 25;
    }
    const PurityReport p = purity_from_histogram(h);
    CHECK(p.g2_zero == doctest::Approx(0.05));
    CHECK(p.purity == doctest::Approx(0.95));
    CHECK(p.mean_side_peak_area == doctest::Approx(100.0));
    CHECK(p.n_side_peaks == 10);
    CHECK(p.uncertainty > 0.0);

    CorrelationHistogram no_period = h;
    no_period.rep_period.reset();
    CHECK_THROWS_AS(purity_from_histogram(no_period), AnalysisError);
    CHECK(purity_from_histogram(no_period, 10, 10000.0).g2_zero == doctest::Approx(0.05));
    try {
        purity_from_histogram(h, 12);
        FAIL("expected AnalysisError");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == "window_too_short");
    }
    CorrelationHistogram empty = h;
    std::fill(empty.counts.begin(), empty.counts.end(), 0);
    CHECK_THROWS_AS(purity_from_histogram(empty), AnalysisError);
}

TEST_CASE("dip fit reports an unresolved zero peak") {
    CorrelationHistogram h;
    h.bin_width = 20;
    h.half_bins = 5500;
    h.rep_period = 10000.0;
    h.counts.assign(11001, 0);
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double d = h.delay(i);
        if (std::round(d / 10000.0) == 0.0) continue;
        double v = 0.0;
        for (int m = -11; m <= 11; ++m) {
            if (m != 0) v += 200.0 * std::exp(-std::abs(d - m * 10000.0) / 1500.0);
        }
        h.counts[i] = static_cast<std::uint64_t>(std::llround(v));
    }
    const DipFit d = fit_dip_time(h, 200.0);
    CHECK_FALSE(d.resolved);
    CHECK(std::isnan(d.tau_dip));
    CHECK(d.tau_envelope == doctest::Approx(1500.0).epsilon(0.05));

    for (auto& c : h.counts) c = c > 190 ? 1 : 0;
    try {
        fit_dip_time(h, 200.0);
        FAIL("sparse histogram was fitted");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == "insufficient_counts");
    }
}

TEST_CASE("recapture fills the zero peak of a simulated HBT run") {
    const auto run = [](double p_sat) {
        const ExperimentConfig c = acceptance::purity_scenario(p_sat, 1.0, 4e6);
        const mc::PulsedResult r = mc::simulate_pulsed(c, {false, 0});
        const double period = c.excitation.period_ps();
        const auto h = correlate(r.streams[0], r.streams[1], 20, static_cast<std::int64_t>(11 * period), period);
        return purity_from_histogram(h);
    };
    const PurityReport off = run(0.0), on = run(0.39);
    CHECK(off.g2_zero < 0.01);
    CHECK(on.g2_zero == doctest::Approx(0.04).epsilon(0.4));
    CHECK(on.g2_zero > off.g2_zero + 3.0 * on.uncertainty);
}
