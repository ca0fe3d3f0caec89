#include <doctest.h>

#include "photonstat/errors.hpp"
#include "photonstat/photometry/photometry.hpp"

#include <cmath>
#include <stdexcept>

using namespace photonstat;
using namespace photonstat::photometry;

TEST_CASE("efficiency arithmetic") {
    CHECK(source_efficiency(220e3, 80e6, 0.078, 0.15).value == doctest::Approx(0.2350427));
    CHECK(collection_efficiency(247e3, 80e6, 0.078, 0.15, 0.5, 0.8).value == doctest::Approx(0.6597222));
    const Efficiency over = source_efficiency(2e6, 1e6, 1.0, 1.0);
    CHECK(over.inconsistent);
    CHECK_FALSE(source_efficiency(1e6, 1e6, 1.0, 1.0).inconsistent);
    CHECK_THROWS_AS(source_efficiency(1.0, 0.0, 0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(source_efficiency(1.0, 1e6, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(collection_efficiency(1.0, 1e6, 0.1, 0.1, 0.0, 0.8), std::invalid_argument);

    const EfficiencyReport r = efficiency_report(220e3, 247e3, 80e6, 0.078, 0.15, 0.5, 0.8);
    CHECK(r.source.value == doctest::Approx(0.2350427));
    CHECK(r.collection.value == doctest::Approx(0.6597222));
}

TEST_CASE("saturation fit recovers the curve") {
    std::vector<SaturationPoint> pts;
    for (double p : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) pts.push_back({p, 2.5e5 * -std::expm1(-p / 1.3)});
    const SaturationCurve c = fit_saturation(pts);
    CHECK(c.rate_sat == doctest::Approx(2.5e5).epsilon(1e-6));
    CHECK(c.p_sat == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(c.evaluate(1.3) == doctest::Approx(2.5e5 * (1.0 - std::exp(-1.0))));
}

TEST_CASE("linear data leave p_sat unconstrained") {
    std::vector<SaturationPoint> pts;
    for (double p : {1.0, 2.0, 3.0, 4.0, 5.0}) pts.push_back({p, 1000.0 * p});
    try {
        fit_saturation(pts);
        FAIL("expected AnalysisError");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == "unconstrained");
        CHECK(std::string(e.what()).find("p_sat") != std::string::npos);
    }
    CHECK_THROWS_AS(fit_saturation({{1, 1}, {2, 2}, {3, 3}}), AnalysisError);
    CHECK_THROWS_AS(fit_saturation({{1, 1}, {1, 2}, {3, 3}, {4, 4}}), AnalysisError);
}

TEST_CASE("saturation csv") {
    const auto pts = parse_saturation_csv("power,rate\n# comment\n0.5,100\n\n1,150\n");
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].power == 1.0);
    CHECK(pts[1].rate == 150.0);
    CHECK_THROWS_AS(parse_saturation_csv("p,r\n1,2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_saturation_csv("power,rate\n1\n"), std::invalid_argument);
}

TEST_CASE("rate comparison") {
    const RateComparison r = rate_comparison(1.5, 1e5, 0.01);
    CHECK(r.emission_rate == doctest::Approx(1e9 / 1.5));
    CHECK(r.detected_ceiling == doctest::Approx(1e9 / 1.5 * 0.01));
    CHECK(r.ratio == doctest::Approx(1e5 / (1e9 / 1.5 * 0.01)));
    CHECK(std::isnan(rate_comparison(1.5, 1e5, 0.0).ratio));
    CHECK_THROWS_AS(rate_comparison(0.0, 1e5, 0.1), std::invalid_argument);
}
