#include <doctest.h>

#include "photonstat/mc/engine.hpp"
#include "photonstat/mc/stream_io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace photonstat;
using namespace photonstat::mc;

namespace {

ExperimentConfig small_config(double pulses) {
    ExperimentConfig c = nominal_device();
    c.duration = pulses / c.excitation.rep_rate;
    return c;
}

SimulationOptions threads(unsigned n, bool photons = true) {
    SimulationOptions o;
    o.threads = n;
    o.keep_photons = photons;
    return o;
}

// Binomial survival check: k of n within 5 sigma of probability p.
void check_stage(std::uint64_t n, std::uint64_t k, double p) {
    const double nd = static_cast<double>(n);
    const double sigma = std::sqrt(nd * p * (1.0 - p));
    CHECK(std::abs(static_cast<double>(k) - nd * p) <= 5.0 * sigma + 1e-9);
}

}  // namespace

TEST_CASE("detected rate matches the closed-form chain expectation") {
    // Blocking makes the pulse-arrival state a three-state Markov chain:
    // empty, occupied on the fast path, occupied on the slow path.
    const ExperimentConfig c = nominal_device();
    const PulsedResult r = simulate_pulsed(c, threads(0, false));
    const double T = c.excitation.period_ps() * 1e-3;
    const double q = pulse_excitation_probability(c.excitation);
    const double s = c.emitter.slow_path_probability();
    const double af = std::exp(-T / c.emitter.tau_fast), as = std::exp(-T / c.emitter.tau_slow);
    const double empty = 1.0 / (1.0 + q * (1.0 - s) * af / (1.0 - af) + q * s * as / (1.0 - as));
    const double expected = static_cast<double>(r.pulses) * empty * q * 0.89 * c.chain.product() *
                            c.detectors[0].efficiency;
    const double clicks = static_cast<double>(r.streams.at(0).timestamps.size());
    CHECK(std::abs(clicks - expected) <= 5.0 * std::sqrt(expected));
}

TEST_CASE("each thinning stage matches its probability") {
    ExperimentConfig c = small_config(2e6);
    c.chain.beta = 0.6;
    c.chain.directionality = 0.5;
    c.chain.sideband_pass = 0.8;
    c.chain.transmission = 0.5;
    c.detectors = {DetectorSpec{0.7, 100.0, 0.0}};
    const PulsedResult r = simulate_pulsed(c, threads(0, false));
    const StageCounts& s = r.stages;
    REQUIRE(s.emitted > 1'000'000);
    check_stage(s.emitted, s.coupled, 0.6);
    check_stage(s.coupled, s.directed, 0.5);
    check_stage(s.directed, s.zero_phonon, 0.8);
    check_stage(s.zero_phonon, s.filtered, 0.89);
    check_stage(s.filtered, s.transmitted, 0.5);
    check_stage(s.transmitted, s.detected, 0.7);
    CHECK(s.jittered <= s.detected);
    CHECK(s.clicks <= s.jittered);
    CHECK(s.clicks == r.streams[0].timestamps.size());
}

TEST_CASE("streams are sorted and respect dead time") {
    ExperimentConfig c = small_config(1e6);
    c.chain.transmission = 1.0;
    c.detectors = {DetectorSpec{1.0, 50.0, 20.0}, DetectorSpec{1.0, 50.0, 20.0}};
    const PulsedResult r = simulate_pulsed(c, threads(0, true));
    for (const auto& s : r.streams) {
        REQUIRE(s.timestamps.size() > 1000);
        for (std::size_t i = 1; i < s.timestamps.size(); ++i) {
            REQUIRE(s.timestamps[i] >= s.timestamps[i - 1] + 20000);
        }
        CHECK(s.config_digest.size() == 64);
    }
    CHECK(r.photons.size() == r.stages.emitted);
}

TEST_CASE("results do not depend on the thread count") {
    ExperimentConfig c = small_config(2.5e6);
    c.excitation.recapture_probability_at_sat = 0.3;
    const PulsedResult one = simulate_pulsed(c, threads(1));
    const PulsedResult four = simulate_pulsed(c, threads(4));
    CHECK(one.photons == four.photons);
    REQUIRE(one.streams.size() == four.streams.size());
    for (std::size_t d = 0; d < one.streams.size(); ++d) {
        CHECK(encode_click_stream(one.streams[d]) == encode_click_stream(four.streams[d]));
    }
    ExperimentConfig other = c;
    other.rng_seed += 1;
    CHECK(simulate_pulsed(other, threads(1)).photons != one.photons);
}

TEST_CASE("recapture produces re-excitation photons only when enabled") {
    ExperimentConfig c = small_config(5e5);
    const PulsedResult off = simulate_pulsed(c, threads(0));
    CHECK(std::none_of(off.photons.begin(), off.photons.end(), [](const PhotonRecord& p) { return p.is_reexcitation; }));
    c.excitation.recapture_probability_at_sat = 0.5;
    const PulsedResult on = simulate_pulsed(c, threads(0));
    CHECK(std::any_of(on.photons.begin(), on.photons.end(), [](const PhotonRecord& p) { return p.is_reexcitation; }));
}

TEST_CASE("zero power gives nothing") {
    ExperimentConfig c = small_config(1e5);
    c.excitation.power_ratio = 0.0;
    const PulsedResult r = simulate_pulsed(c, threads(0));
    CHECK(r.photons.empty());
    CHECK(r.streams[0].timestamps.empty());

    ExperimentConfig cw = small_config(1e5);
    cw.excitation.mode = ExcitationMode::CW;
    cw.excitation.power_ratio = 0.0;
    CHECK(simulate_cw(cw).streams[0].timestamps.empty());
}

TEST_CASE("cw emission rate saturates") {
    ExperimentConfig c = nominal_device();
    c.excitation.mode = ExcitationMode::CW;
    c.emitter.slow_branch_fraction = 0.0;
    c.chain.beta = c.chain.directionality = c.chain.sideband_pass = c.chain.transmission = 1.0;
    c.emitter.complexes = {{ComplexTag::Xminus, 1264.0, 1.0}};
    c.detectors = {DetectorSpec{1.0, 0.0, 0.0}};
    c.duration = 2e-3;
    const CwResult r = simulate_cw(c);
    // Steady state (1 - exp(-P)) / tau_fast photons per ns.
    const double expected = (1.0 - std::exp(-1.0)) / 1.5e-9 * c.duration;
    const double clicks = static_cast<double>(r.streams[0].timestamps.size());
    CHECK(std::abs(clicks - expected) <= 5.0 * std::sqrt(expected));
    CHECK_THROWS_AS(simulate_pulsed(c), SimulationError);
}

TEST_CASE("background merge") {
    ExperimentConfig c = nominal_device();
    c.duration = 10.0;
    ClickStream empty;
    const ClickStream b = merge_background(empty, 100.0, c);
    CHECK(std::abs(static_cast<double>(b.timestamps.size()) - 1000.0) <= 5.0 * std::sqrt(1000.0));
    CHECK(std::is_sorted(b.timestamps.begin(), b.timestamps.end()));
    CHECK(merge_background(b, 0.0, c).timestamps == b.timestamps);
    CHECK_THROWS_AS(merge_background(b, -1.0, c), std::invalid_argument);
}

TEST_CASE("stream formats round trip") {
    ClickStream s;
    s.detector_id = 3;
    s.timestamps = {0, 5, 123456789012345ull, 123456789012346ull};
    const std::string bin = encode_click_stream(s);
    CHECK(bin.size() == 16 + 8 * 4);
    CHECK(bin.compare(0, 4, "PSTM") == 0);
    const ClickStream back = decode_click_stream(bin);
    CHECK(back.detector_id == 3);
    CHECK(back.timestamps == s.timestamps);
    CHECK(parse_click_stream_csv(click_stream_csv(s), 3).timestamps == s.timestamps);

    std::string bad = bin;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_click_stream(bad), StreamFormatError);
    CHECK_THROWS_AS(decode_click_stream(bin.substr(0, bin.size() - 1)), StreamFormatError);
    CHECK_THROWS_AS(parse_click_stream_csv("10\n5\n"), StreamFormatError);

    std::vector<PhotonRecord> ph{{1, 12.5, ComplexTag::Xminus, false}, {2, 3.25, ComplexTag::X, true}};
    CHECK(parse_photons_csv(photons_csv(ph)) == ph);
}
