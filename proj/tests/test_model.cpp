#include <doctest.h>

#include "photonstat/model.hpp"
#include "photonstat/model_json.hpp"

#include <cmath>
#include <stdexcept>

using namespace photonstat;

namespace {

bool has_violation(const ExperimentConfig& c, const std::string& field) {
    for (const auto& v : validate(c)) {
        if (v.field == field) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("nominal device is valid") {
    const ExperimentConfig c = nominal_device();
    CHECK(validate(c).empty());
    CHECK(c.pulse_count() == 10'000'000);
    CHECK(c.chain.passes(1264.0));
    CHECK_FALSE(c.chain.passes(1268.0));
}

TEST_CASE("validation reports each broken field") {
    ExperimentConfig c = nominal_device();
    c.emitter.tau_slow = 1.0;
    c.chain.beta = NAN;
    c.detectors[0].efficiency = 1.5;
    c.emitter.complexes[0].relative_intensity = 0.5;
    c.duration = INFINITY;
    CHECK(has_violation(c, "emitter.tau_slow"));
    CHECK(has_violation(c, "chain.beta"));
    CHECK(has_violation(c, "detectors.0.efficiency"));
    CHECK(has_violation(c, "emitter.complexes"));
    CHECK(has_violation(c, "duration"));

    ExperimentConfig d = nominal_device();
    d.detectors.clear();
    CHECK(has_violation(d, "detectors"));
    d = nominal_device();
    d.emitter.complexes[1].emission_energy = d.emitter.complexes[0].emission_energy;
    CHECK(has_violation(d, "emitter.complexes.1.emission_energy"));
}

TEST_CASE("excitation laws") {
    ExcitationSpec e;
    e.recapture_probability_at_sat = 0.4;
    e.power_ratio = 0.5;
    CHECK(recapture_probability(e) == doctest::Approx(0.2));
    e.power_ratio = 3.0;
    CHECK(recapture_probability(e) == doctest::Approx(1.0));
    e.power_ratio = 1.0;
    CHECK(pulse_excitation_probability(e) == doctest::Approx(1.0 - std::exp(-1.0)));
    e.power_ratio = 0.0;
    CHECK(pulse_excitation_probability(e) == 0.0);
}

TEST_CASE("energy and wavelength") {
    CHECK(energy_mev_to_nm(1264.0) == doctest::Approx(980.9).epsilon(1e-3));
    CHECK(nm_to_energy_mev(energy_mev_to_nm(1234.5)) == doctest::Approx(1234.5));
}

TEST_CASE("json round trip and strictness") {
    const ExperimentConfig c = nominal_device();
    const nlohmann::json j = to_json(c);
    const ExperimentConfig back = config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(config_digest(back) == config_digest(c));

    nlohmann::json extra = j;
    extra["emitter"]["colour"] = "red";
    CHECK_THROWS_AS(config_from_json(extra), ConfigError);
    nlohmann::json missing = j;
    missing["chain"].erase("beta");
    try {
        config_from_json(missing);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.where() == "chain.beta");
    }
}

TEST_CASE("syntax errors carry a location") {
    try {
        parse_json_text("{\n  \"a\": ,\n}");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.where().find("line 2") != std::string::npos);
    }
}

TEST_CASE("dotted overrides") {
    nlohmann::json j = to_json(nominal_device());
    apply_override(j, "emitter.tau_fast=1.7");
    apply_override(j, "detectors.0.dead_time=10");
    apply_override(j, "excitation.mode=CW");
    const ExperimentConfig c = config_from_json(j);
    CHECK(c.emitter.tau_fast == 1.7);
    CHECK(c.detectors[0].dead_time == 10.0);
    CHECK(c.excitation.mode == ExcitationMode::CW);
    CHECK(config_digest(c) != config_digest(nominal_device()));
    CHECK_THROWS_AS(apply_override(j, "emitter.nope=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(j, "detectors.5.efficiency=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
}
