#include <doctest.h>

#include "photonstat/errors.hpp"
#include "photonstat/spectral/lineshape.hpp"
#include "photonstat/spectral/voigt.hpp"

#include <cmath>
#include <stdexcept>

using namespace photonstat;
using namespace photonstat::spectral;

TEST_CASE("voigt against reference values") {
    // (lorentzian FWHM, gaussian FWHM, x, value) from an independent
    // Faddeeva-function implementation.
    const double ref[][4] = {{1, 1, 0, 0.4491109392515199},        {1, 1, 0.7, 0.26594639557380645},
                             {1, 1, 3.0, 0.01827629076820943},     {2.07, 0.77, 0, 0.2832206730556154},
                             {2.07, 0.77, 1.5, 0.10463356911360108}, {0.05, 1.0, 0.2, 0.8068917843230112},
                             {1.0, 0.05, 0.3, 0.4681366954287853},  {0.3, 2.0, 10.0, 0.00048807439142835887}};
    for (const auto& r : ref) CHECK(voigt(r[2], r[0], r[1]) == doctest::Approx(r[3]).epsilon(1e-9));
    CHECK(voigt_fwhm(1.0, 1.0) == doctest::Approx(1.6375953596).epsilon(1e-9));
}

TEST_CASE("voigt limits") {
    CHECK(voigt(0.3, 1.2, 0.0) == doctest::Approx(lorentzian(0.3, 1.2)));
    CHECK(voigt(0.3, 0.0, 1.2) == doctest::Approx(gaussian(0.3, 1.2)));
    CHECK(voigt_fwhm(0.8, 0.0) == doctest::Approx(0.8));
    CHECK(voigt_fwhm(0.0, 0.8) == doctest::Approx(0.8));
    CHECK_THROWS_AS(voigt(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK(lorentzian(0.5, 1.0) == doctest::Approx(0.5 * lorentzian(0.0, 1.0)));
    CHECK(gaussian(0.5, 1.0) == doctest::Approx(0.5 * gaussian(0.0, 1.0)));
}

TEST_CASE("lorentzian etalon scan round trip") {
    const LineProfile p = scan_etalon({0.77, 0.0, 0.0}, 1.3, 0.1, 1e4, 11);
    REQUIRE(p.true_line.has_value());
    CHECK(p.detunings.front() == doctest::Approx(-6.0 * 2.07).epsilon(0.01));
    CHECK(*std::max_element(p.intensities.begin(), p.intensities.end()) == doctest::Approx(1e4).epsilon(0.03));
    LinewidthReport r = fit_lineshape(p, 1.3);
    CHECK(r.model == LineModel::Lorentzian);
    CHECK(r.deconvolved_fwhm == doctest::Approx(0.77).epsilon(0.05));
    CHECK(r.measured_fwhm == doctest::Approx(r.deconvolved_fwhm + 1.3));
    CHECK(evaluate_fit(r, r.center) == doctest::Approx(r.amplitude));
    CHECK(evaluate_fit(r, r.center + 0.5 * r.measured_fwhm) == doctest::Approx(0.5 * r.amplitude));
    coherence_metrics(r, 1.7);
    CHECK(*r.t2 == doctest::Approx(1.0 / r.deconvolved_fwhm));

    const LineProfile again = scan_etalon({0.77, 0.0, 0.0}, 1.3, 0.1, 1e4, 11);
    CHECK(again.intensities == p.intensities);
}

TEST_CASE("a line far below the etalon width is resolution limited") {
    const LineProfile p = scan_etalon({0.0, 0.0, 0.0}, 1.3, 0.1, 1e4, 5);
    const LinewidthReport r = fit_lineshape(p, 1.3);
    CHECK(r.model == LineModel::Lorentzian);
    CHECK(r.resolution_limited);
    CHECK(r.deconvolved_fwhm < 0.05);
}

TEST_CASE("fit input checks") {
    LineProfile narrow;
    for (int i = -5; i <= 5; ++i) {
        narrow.detunings.push_back(0.1 * i);
        narrow.intensities.push_back(1000.0 / (1.0 + 0.01 * i * i));
    }
    try {
        fit_lineshape(narrow, 1.3);
        FAIL("expected AnalysisError");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == "span_too_narrow");
    }
    CHECK_THROWS_AS(scan_etalon({0.77, 0, 0}, 1.3, 1.0, 1e4, 1), std::invalid_argument);
    CHECK_THROWS_AS(scan_etalon({0.77, 0, 0}, 0.0, 0.1, 1e4, 1), std::invalid_argument);
}

TEST_CASE("coherence metrics") {
    const CoherenceMetrics m = coherence_metrics(0.77, 1.7);
    CHECK(m.transform_limit == doctest::Approx(1.0 / (2.0 * M_PI * 1.7)));
    CHECK(m.broadening_ratio == doctest::Approx(2.0 * M_PI * 0.77 * 1.7));
    CHECK(coherence_metrics(0.4, 1.7).t2 == doctest::Approx(2.5));
    CHECK_THROWS_AS(coherence_metrics(0.0, 1.7), std::invalid_argument);
}

TEST_CASE("profile csv round trip") {
    LineProfile p;
    p.detunings = {-0.1, 0.0, 0.1};
    p.intensities = {3, 10, 4};
    const LineProfile back = parse_profile_csv(profile_csv(p));
    CHECK(back.detunings == p.detunings);
    CHECK(back.intensities == p.intensities);
}
