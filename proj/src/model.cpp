#include "photonstat/model.hpp"

#include <algorithm>
#include <cmath>

namespace photonstat {

namespace {

constexpr double kHcMevNm = 1239841.98419;  // h c in meV nm

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

class Collector {
public:
    void require(bool ok, std::string field, std::string rule) {
        if (!ok) out_.push_back({std::move(field), std::move(rule)});
    }
    std::vector<Violation> take() { return std::move(out_); }

private:
    std::vector<Violation> out_;
};

}  // namespace

std::string_view to_string(ComplexTag tag) {
    switch (tag) {
        case ComplexTag::X: return "X";
        case ComplexTag::Xminus: return "Xminus";
        case ComplexTag::XX: return "XX";
        case ComplexTag::XminusStar: return "XminusStar";
        case ComplexTag::Xminus2: return "Xminus2";
    }
    return "?";
}

std::optional<ComplexTag> complex_tag_from_string(std::string_view s) {
    for (ComplexTag t : {ComplexTag::X, ComplexTag::Xminus, ComplexTag::XX, ComplexTag::XminusStar,
                         ComplexTag::Xminus2}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

double energy_mev_to_nm(double energy_mev) { return kHcMevNm / energy_mev; }
double nm_to_energy_mev(double wavelength_nm) { return kHcMevNm / wavelength_nm; }

bool OpticalChain::passes(double emission_energy_mev) const {
    const double lambda = energy_mev_to_nm(emission_energy_mev);
    return std::abs(lambda - filter_center) <= 0.5 * filter_bandwidth;
}

std::uint64_t ExperimentConfig::pulse_count() const {
    const double n = std::round(duration * excitation.rep_rate);
    if (!(n > 0.0)) return 0;
    return static_cast<std::uint64_t>(n);
}

double recapture_probability(const ExcitationSpec& e) {
    return std::clamp(e.recapture_probability_at_sat * e.power_ratio, 0.0, 1.0);
}

double pulse_excitation_probability(const ExcitationSpec& e) {
    return -std::expm1(-e.power_ratio);
}

std::vector<Violation> validate(const ExperimentConfig& c) {
    Collector v;
    const EmitterSpec& em = c.emitter;
    v.require(em.tau_fast > 0.0 && std::isfinite(em.tau_fast), "emitter.tau_fast", "must be > 0");
    v.require(em.tau_slow >= em.tau_fast && std::isfinite(em.tau_slow), "emitter.tau_slow",
              "must satisfy tau_slow >= tau_fast");
    v.require(is_probability(em.slow_branch_fraction), "emitter.slow_branch_fraction", "must be in [0, 1]");
    v.require(is_probability(em.dark_fraction), "emitter.dark_fraction", "must be in [0, 1]");
    v.require(em.homogeneous_linewidth >= 0.0, "emitter.homogeneous_linewidth", "must be >= 0");
    v.require(em.gaussian_linewidth >= 0.0, "emitter.gaussian_linewidth", "must be >= 0");
    v.require(!em.complexes.empty(), "emitter.complexes", "must list at least one charge complex");
    double weight_sum = 0.0;
    bool weights_finite = true;
    for (std::size_t i = 0; i < em.complexes.size(); ++i) {
        const ChargeComplex& cc = em.complexes[i];
        const std::string path = "emitter.complexes." + std::to_string(i);
        v.require(cc.emission_energy > 0.0 && std::isfinite(cc.emission_energy), path + ".emission_energy",
                  "must be > 0");
        v.require(is_probability(cc.relative_intensity), path + ".relative_intensity", "must be in [0, 1]");
        weights_finite = weights_finite && std::isfinite(cc.relative_intensity);
        weight_sum += cc.relative_intensity;
        for (std::size_t j = 0; j < i; ++j) {
            v.require(em.complexes[j].emission_energy != cc.emission_energy, path + ".emission_energy",
                      "must differ from every other complex of the emitter");
        }
    }
    if (!em.complexes.empty()) {
        v.require(weights_finite && std::abs(weight_sum - 1.0) <= 1e-9, "emitter.complexes",
                  "relative_intensity values must sum to 1");
    }

    const ExcitationSpec& ex = c.excitation;
    if (ex.mode == ExcitationMode::Pulsed) {
        v.require(ex.rep_rate > 0.0 && std::isfinite(ex.rep_rate), "excitation.rep_rate",
                  "must be > 0 in pulsed mode");
    }
    v.require(ex.pulse_width > 0.0 && std::isfinite(ex.pulse_width), "excitation.pulse_width", "must be > 0");
    v.require(ex.power_ratio >= 0.0 && std::isfinite(ex.power_ratio), "excitation.power_ratio", "must be >= 0");
    v.require(is_probability(ex.recapture_probability_at_sat), "excitation.recapture_probability_at_sat",
              "must be in [0, 1]");
    v.require(ex.recapture_time >= 0.0 && std::isfinite(ex.recapture_time), "excitation.recapture_time",
              "must be >= 0");

    const OpticalChain& ch = c.chain;
    v.require(is_probability(ch.beta), "chain.beta", "must be in [0, 1]");
    v.require(is_probability(ch.directionality), "chain.directionality", "must be in [0, 1]");
    v.require(is_probability(ch.sideband_pass), "chain.sideband_pass", "must be in [0, 1]");
    v.require(is_probability(ch.transmission), "chain.transmission", "must be in [0, 1]");
    v.require(ch.filter_center > 0.0 && std::isfinite(ch.filter_center), "chain.filter_center", "must be > 0");
    v.require(ch.filter_bandwidth > 0.0 && std::isfinite(ch.filter_bandwidth), "chain.filter_bandwidth",
              "must be > 0");

    v.require(!c.detectors.empty(), "detectors", "at least one detector is required");
    for (std::size_t i = 0; i < c.detectors.size(); ++i) {
        const DetectorSpec& d = c.detectors[i];
        const std::string path = "detectors." + std::to_string(i);
        v.require(is_probability(d.efficiency), path + ".efficiency", "must be in [0, 1]");
        v.require(d.jitter_fwhm >= 0.0 && std::isfinite(d.jitter_fwhm), path + ".jitter_fwhm", "must be >= 0");
        v.require(d.dead_time >= 0.0 && std::isfinite(d.dead_time), path + ".dead_time", "must be >= 0");
    }
    v.require(c.duration > 0.0 && std::isfinite(c.duration), "duration", "must be > 0");
    return v.take();
}

ExperimentConfig nominal_device() {
    ExperimentConfig c;
    c.emitter.tau_fast = 1.5;
    c.emitter.tau_slow = 30.0;
    c.emitter.slow_branch_fraction = 0.1;
    c.emitter.dark_fraction = 0.0;
    // X- / (X + X-) weight from the pulsed X- and X+X- count rates (220 vs 247 kcps).
    c.emitter.complexes = {
        {ComplexTag::Xminus, 1264.0, 0.89},
        {ComplexTag::X, 1268.0, 0.11},
    };
    c.emitter.homogeneous_linewidth = 0.77;
    c.emitter.gaussian_linewidth = 0.0;

    c.excitation.mode = ExcitationMode::Pulsed;
    c.excitation.rep_rate = 80e6;
    c.excitation.pulse_width = 100.0;
    c.excitation.power_ratio = 1.0;
    c.excitation.recapture_probability_at_sat = 0.0;
    c.excitation.recapture_time = 50.0;

    c.chain.beta = 0.95;
    c.chain.directionality = 0.5;
    c.chain.sideband_pass = 0.8;
    c.chain.transmission = 0.078;
    c.chain.filter_center = energy_mev_to_nm(1264.0);
    c.chain.filter_bandwidth = 0.1;

    c.detectors = {DetectorSpec{0.15, 200.0, 0.0}};
    c.duration = 0.125;  // 1e7 pulses at 80 MHz
    c.rng_seed = 20220401;
    return c;
}

}  // namespace photonstat
