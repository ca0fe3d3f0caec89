#include <doctest.h>

#include "photonstat/acceptance/criteria.hpp"
#include "photonstat/errors.hpp"
#include "photonstat/mc/engine.hpp"
#include "photonstat/numerics/histogram.hpp"
#include "photonstat/numerics/rng.hpp"
#include "photonstat/tcspc/decay.hpp"

#include <cmath>
#include <stdexcept>

using namespace photonstat;
using namespace photonstat::tcspc;

namespace {

// Expected counts a e^{-t/tf} + b e^{-t/ts} at bin centres, optionally
// Poisson-drawn.
DecayHistogram synthetic(double a, double tf, double b, double ts, double bin_ps, std::size_t n,
                         numerics::RandomStream* rng) {
    DecayHistogram h;
    h.bin_width = bin_ps;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.5) * bin_ps * 1e-3;
        const double mu = a * std::exp(-t / tf) + b * std::exp(-t / ts);
        h.counts.push_back(rng ? rng->poisson(mu) : static_cast<std::uint64_t>(std::llround(mu)));
    }
    return h;
}

}  // namespace

TEST_CASE("histogram building") {
    std::vector<mc::PhotonRecord> ph{{0, 10.0, ComplexTag::X, false}, {1, 99.9, ComplexTag::X, false},
                                     {2, 100.0, ComplexTag::X, false}, {3, -1.0, ComplexTag::X, false}};
    const DecayHistogram h = build_decay_histogram(ph, 50.0, 100.0);
    CHECK(h.counts == std::vector<std::uint64_t>{1, 1});
    CHECK(h.bin_center(1) == 75.0);

    mc::ClickStream s;
    s.timestamps = {10, 1010, 2990, 3000};
    const DecayHistogram f = build_decay_histogram(s, 1000.0, 500.0, 1000.0);
    CHECK(f.counts == std::vector<std::uint64_t>{3, 1});
    CHECK_THROWS_AS(build_decay_histogram(s, 0.0, 500.0, 1000.0), std::invalid_argument);
}

TEST_CASE("noiseless bi-exponential is recovered") {
    const DecayHistogram h = synthetic(1e5, 1.5, 3e3, 30.0, 100.0, 1000, nullptr);
    const DecayFit f = fit_biexponential(h);
    REQUIRE_FALSE(f.single_component);
    CHECK(f.tau_fast == doctest::Approx(1.5).epsilon(2e-3));
    CHECK(f.tau_slow == doctest::Approx(30.0).epsilon(2e-3));
    CHECK(f.amplitude_slow / f.amplitude_fast == doctest::Approx(0.03).epsilon(0.01));
}

TEST_CASE("estimator is unbiased over repeated Poisson draws") {
    numerics::RandomStream rng(77, 0);
    std::vector<double> fast, slow;
    for (int trial = 0; trial < 20; ++trial) {
        const DecayHistogram h = synthetic(2e4, 1.5, 600.0, 30.0, 100.0, 1000, &rng);
        const DecayFit f = fit_biexponential(h);
        REQUIRE_FALSE(f.single_component);
        fast.push_back(f.tau_fast);
        slow.push_back(f.tau_slow);
    }
    const auto mf = numerics::mean_std(fast), ms = numerics::mean_std(slow);
    // Bias below both 1% and four standard errors of the mean.
    CHECK(std::abs(mf.mean - 1.5) < std::max(0.01 * 1.5, 4.0 * mf.std / std::sqrt(20.0)));
    CHECK(std::abs(ms.mean - 30.0) < std::max(0.01 * 30.0, 4.0 * ms.std / std::sqrt(20.0)));
    CHECK(std::abs(mf.mean - 1.5) < 0.015);
    CHECK(std::abs(ms.mean - 30.0) < 0.6);
}

TEST_CASE("single exponential selects one component") {
    numerics::RandomStream rng(3, 0);
    const DecayHistogram h = synthetic(5e3, 2.0, 0.0, 30.0, 100.0, 200, &rng);
    const DecayFit f = fit_biexponential(h);
    CHECK(f.single_component);
    CHECK(f.tau_fast == doctest::Approx(2.0).epsilon(0.03));
    CHECK(f.tau_slow == f.tau_fast);
    CHECK(f.sigma_tau_slow() == f.sigma_tau_fast());
}

TEST_CASE("background term") {
    DecayHistogram h = synthetic(1e4, 1.0, 0.0, 30.0, 50.0, 400, nullptr);
    for (auto& c : h.counts) c += 50;
    DecayFitOptions o;
    o.fit_background = true;
    const DecayFit f = fit_biexponential(h, o);
    CHECK(f.single_component);
    CHECK(f.tau_fast == doctest::Approx(1.0).epsilon(0.01));
    CHECK(f.background == doctest::Approx(50.0).epsilon(0.02));
}

TEST_CASE("too few counts or bins") {
    DecayHistogram h;
    h.bin_width = 100.0;
    h.counts.assign(100, 1);
    CHECK_THROWS_AS(fit_biexponential(h), AnalysisError);
    DecayHistogram narrow = synthetic(1e5, 1.5, 0.0, 30.0, 100.0, 6, nullptr);
    try {
        fit_biexponential(narrow);
        FAIL("expected AnalysisError");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == "insufficient_counts");
    }
}

TEST_CASE("simulated slow lifetimes across the window") {
    for (double ts : {8.0, 120.0}) {
        CAPTURE(ts);
        ExperimentConfig c = acceptance::lifetime_scenario(4e6);
        c.emitter.tau_slow = ts;
        const mc::PulsedResult r = mc::simulate_pulsed(c, {false, 0});
        const double period = c.excitation.period_ps();
        const DecayHistogram h = build_decay_histogram(r.streams[0], period, 100.0, period);
        DecayFitOptions o;
        o.fit_start = 500.0;
        o.fit_end = period - 500.0;
        const DecayFit f = fit_biexponential(h, o);
        REQUIRE_FALSE(f.single_component);
        CHECK(f.tau_fast == doctest::Approx(1.5).epsilon(0.05));
        CHECK(f.tau_slow == doctest::Approx(ts).epsilon(0.08));
    }
}
