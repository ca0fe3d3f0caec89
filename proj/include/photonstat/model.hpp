#pragma once

// Physical description of one emitter, its excitation, the optical chain and
// the detectors. Units follow the field comments and are used unchanged by
// the JSON schema.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace photonstat {

enum class ComplexTag : std::uint8_t { X, Xminus, XX, XminusStar, Xminus2 };

std::string_view to_string(ComplexTag tag);
std::optional<ComplexTag> complex_tag_from_string(std::string_view s);

struct ChargeComplex {
    ComplexTag tag = ComplexTag::Xminus;
    double emission_energy = 0.0;     // meV
    double relative_intensity = 0.0;  // weights of one emitter sum to 1
};

struct EmitterSpec {
    double tau_fast = 0.0;              // ns, radiative lifetime
    double tau_slow = 0.0;              // ns, spin-flip / excited-trion time
    double slow_branch_fraction = 0.0;  // bright excitations routed through the slow channel
    double dark_fraction = 0.0;         // excitations landing in a dark spin configuration
    std::vector<ChargeComplex> complexes;
    double homogeneous_linewidth = 0.0;  // GHz
    double gaussian_linewidth = 0.0;     // GHz

    /// Probability that one excitation emits through the tau_slow delay.
    double slow_path_probability() const {
        return dark_fraction + (1.0 - dark_fraction) * slow_branch_fraction;
    }
};

enum class ExcitationMode : std::uint8_t { CW, Pulsed };

struct ExcitationSpec {
    ExcitationMode mode = ExcitationMode::Pulsed;
    double rep_rate = 0.0;                      // Hz
    double pulse_width = 0.0;                   // ps
    double power_ratio = 0.0;                   // P / P_sat
    double recapture_probability_at_sat = 0.0;  // per emission, at P = P_sat
    double recapture_time = 0.0;                // ps, reservoir lifetime

    double period_ps() const { return 1e12 / rep_rate; }
};

struct OpticalChain {
    double beta = 0.0;
    double directionality = 0.0;
    double sideband_pass = 0.0;
    double transmission = 0.0;
    double filter_center = 0.0;     // nm
    double filter_bandwidth = 0.0;  // nm, full width of the bandpass

    /// Survival probability of a photon that passes the spectral filter,
    /// excluding detector efficiency.
    double product() const { return beta * directionality * sideband_pass * transmission; }
    bool passes(double emission_energy_mev) const;
};

struct DetectorSpec {
    double efficiency = 0.0;   // eta_d
    double jitter_fwhm = 0.0;  // ps
    double dead_time = 0.0;    // ns
};

struct ExperimentConfig {
    EmitterSpec emitter;
    ExcitationSpec excitation;
    OpticalChain chain;
    std::vector<DetectorSpec> detectors;
    double duration = 0.0;  // s of simulated time
    std::uint64_t rng_seed = 0;

    /// Number of excitation pulses covered by `duration` (pulsed mode).
    std::uint64_t pulse_count() const;
};

struct Violation {
    std::string field;  ///< dotted path, e.g. "chain.beta"
    std::string rule;

    bool operator==(const Violation&) const = default;
};

/// Checks every type invariant; an empty result means the config is usable.
/// Never throws for any representable field values (NaN and infinities
/// included).
std::vector<Violation> validate(const ExperimentConfig& config);

/// Nominal nanowire device: the starting point of `reproduce` and of the
/// CLI's default config.
ExperimentConfig nominal_device();

/// Recapture probability per emission at the configured power: linear in
/// P/P_sat through the origin, equal to recapture_probability_at_sat at
/// P = P_sat and clamped to [0, 1].
double recapture_probability(const ExcitationSpec& excitation);

/// Probability that one pulse excites an empty emitter: 1 - exp(-P/P_sat).
double pulse_excitation_probability(const ExcitationSpec& excitation);

/// Photon energy (meV) to vacuum wavelength (nm) and back.
double energy_mev_to_nm(double energy_mev);
double nm_to_energy_mev(double wavelength_nm);

}  // namespace photonstat
