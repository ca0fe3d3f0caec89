#include <doctest.h>

#include "photonstat/spectral/array.hpp"

#include <cmath>
#include <stdexcept>

using namespace photonstat;
using namespace photonstat::spectral;

namespace {

DeviceSpectrum hand_made(const std::vector<std::pair<double, double>>& lines) {
    DeviceSpectrum d;
    for (double wl = 970.0; wl <= 990.0; wl += 0.01) {
        double c = 2.0;
        const double e = nm_to_energy_mev(wl);
        for (auto [energy, height] : lines) {
            const double s = 0.1;
            c += height * std::exp(-0.5 * (e - energy) * (e - energy) / (s * s));
        }
        d.wavelength.push_back(wl);
        d.counts.push_back(std::round(c));
    }
    return d;
}

}  // namespace

TEST_CASE("classification of hand-made spectra") {
    const DeviceSpectrum two = hand_made({{1264.0, 2000.0}, {1268.0, 800.0}});
    const Classification c = classify_spectrum(two.wavelength, two.counts);
    CHECK(c.two_dominant);
    CHECK_FALSE(c.multi_peak);
    REQUIRE(c.trion_energy.has_value());
    CHECK(*c.trion_energy == doctest::Approx(1264.0).epsilon(1e-4));
    REQUIRE(c.peaks.size() == 2);
    CHECK(c.peaks[0].tag == ComplexTag::Xminus);
    CHECK(c.peaks[1].tag == ComplexTag::X);

    const DeviceSpectrum three = hand_made({{1260.0, 2000.0}, {1264.0, 1500.0}, {1268.0, 900.0}});
    const Classification m = classify_spectrum(three.wavelength, three.counts);
    CHECK(m.multi_peak);
    CHECK_FALSE(m.two_dominant);
    CHECK_FALSE(m.trion_energy.has_value());

    const DeviceSpectrum flat = hand_made({});
    CHECK(classify_spectrum(flat.wavelength, flat.counts).no_emitter());
    CHECK_THROWS_AS(classify_spectrum({}, {}), std::invalid_argument);
}

TEST_CASE("device spectra do not depend on the array size") {
    const ArrayStatistics st;
    const auto small = generate_array(3, st, 21), large = generate_array(10, st, 21);
    for (std::size_t i = 0; i < 3; ++i) CHECK(small.devices[i].counts == large.devices[i].counts);
    CHECK(generate_array(3, st, 22).devices[0].counts != small.devices[0].counts);
    CHECK_THROWS_AS(generate_array(0, st, 1), std::invalid_argument);
}

TEST_CASE("classifier agrees with the generator") {
    const auto set = generate_array(40, {}, 31);
    const YieldReport y = yield_report(set);
    REQUIRE(y.classifications.size() == 40);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < 40; ++i) agree += y.classifications[i].two_dominant == set.devices[i].two_peak;
    CHECK(agree >= 38);
    for (std::size_t i = 0; i < 40; ++i) {
        const auto& c = y.classifications[i];
        if (!c.two_dominant || !set.devices[i].two_peak) continue;
        CHECK(*c.trion_energy == doctest::Approx(set.devices[i].truth[0].energy).epsilon(1e-4));
    }
}

TEST_CASE("spectrum csv round trip") {
    const auto set = generate_array(1, {}, 41);
    const DeviceSpectrum back = parse_spectrum_csv(spectrum_csv(set.devices[0]));
    CHECK(back.counts == set.devices[0].counts);
    REQUIRE(back.wavelength.size() == set.devices[0].wavelength.size());
    for (std::size_t i = 0; i < back.wavelength.size(); ++i) CHECK(back.wavelength[i] == set.devices[0].wavelength[i]);
    CHECK_THROWS_AS(parse_spectrum_csv("a,b\n1,2\n"), std::invalid_argument);
}
