#pragma once

#include "photonstat/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace photonstat::mc {

struct PhotonRecord {
    std::uint64_t pulse_index = 0;  ///< 0 in CW mode
    double emission_time = 0.0;     ///< ps since the pulse (CW: absolute ps)
    ComplexTag complex = ComplexTag::Xminus;
    bool is_reexcitation = false;

    bool operator==(const PhotonRecord&) const = default;
};

struct ClickStream {
    std::uint16_t detector_id = 0;
    std::vector<std::uint64_t> timestamps;  ///< absolute ps, non-decreasing
    std::string config_digest;
};

/// Survivors after each thinning stage, summed over detectors.
struct StageCounts {
    std::uint64_t emitted = 0;
    std::uint64_t coupled = 0;      ///< beta
    std::uint64_t directed = 0;     ///< directionality
    std::uint64_t zero_phonon = 0;  ///< sideband_pass
    std::uint64_t filtered = 0;     ///< spectral bandpass
    std::uint64_t transmitted = 0;  ///< eta_t
    std::uint64_t detected = 0;     ///< eta_d
    std::uint64_t jittered = 0;     ///< kept after jitter (negative times dropped)
    std::uint64_t clicks = 0;       ///< kept after dead time

    StageCounts& operator+=(const StageCounts& o);
};

struct SimulationOptions {
    bool keep_photons = true;
    /// 0: hardware concurrency; see resolve_threads.
    unsigned threads = 0;
};

struct PulsedResult {
    std::vector<PhotonRecord> photons;  ///< empty unless keep_photons
    std::vector<ClickStream> streams;   ///< one per detector
    StageCounts stages;
    std::uint64_t pulses = 0;
    std::uint64_t excitations = 0;      ///< first-generation excitations
    std::uint64_t blocked_pulses = 0;   ///< pulses that found the emitter still occupied
};

struct CwResult {
    std::vector<ClickStream> streams;
    StageCounts stages;
    std::uint64_t excitations = 0;
};

/// Raised for configs the engine cannot run (wrong mode, invariant
/// violations).
class SimulationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Pulses per partition of the fixed partition plan. Each partition starts
/// with an empty emitter and draws from rng_substream(seed, partition).
inline constexpr std::uint64_t kPulsesPerPartition = 1ull << 20;
/// CW partition length in ps (1 ms).
inline constexpr double kCwPartitionPs = 1e9;

/// Worker count: `requested`, or hardware concurrency when 0; either is
/// capped by PHOTONSTAT_THREADS when that is set.
unsigned resolve_threads(unsigned requested);

PulsedResult simulate_pulsed(const ExperimentConfig& config, const SimulationOptions& options = {});

CwResult simulate_cw(const ExperimentConfig& config, const SimulationOptions& options = {});

/// Merges uncorrelated Poissonian clicks at `dark_rate` (cps) over the
/// config's duration into the stream, then re-applies the detector's dead
/// time. A dark_rate of 0 returns the stream unchanged.
ClickStream merge_background(const ClickStream& stream, double dark_rate, const ExperimentConfig& config);

/// Cyclic CW excitation rate (1/ps) while the emitter is empty:
/// (exp(P/P_sat) - 1) / tau_fast, which makes the steady-state emission rate
/// (1 - exp(-P/P_sat)) / tau_fast.
double cw_excitation_rate(const ExperimentConfig& config);

}  // namespace photonstat::mc
