#pragma once

#include "photonstat/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace photonstat::spectral {

/// Generator rules for an array of nanowire spectra. Heights are relative
/// to the trion peak.
struct ArrayStatistics {
    double mean_trion_energy = 1264.0;  // meV
    double std_trion_energy = 6.0;      // meV
    double two_peak_probability = 0.72;
    double exciton_splitting = 4.0;     ///< meV above the trion; a free parameter
    double exciton_height_min = 0.3;
    double exciton_height_max = 1.0;
    /// Chance of weak satellites: one X-2 line red of the trion and two X-*
    /// lines blue of the exciton, all well below typical dominance thresholds.
    double satellite_probability = 0.5;
    double satellite_height_min = 0.03;
    double satellite_height_max = 0.15;
    /// Multi-peak devices get 1 to 3 extra bright lines in this height range.
    double extra_height_min = 0.3;
    double extra_height_max = 0.9;
    double instrument_fwhm = 0.060;  // meV
    double wavelength_step = 0.01;   // nm
    double window = 20.0;            ///< meV on each side of the trion
    double peak_counts = 2000.0;     ///< expected counts at the trion maximum
    double background_counts = 2.0;  ///< expected counts per bin
};

struct PeakAnnotation {
    double energy = 0.0;  // meV
    ComplexTag tag = ComplexTag::Xminus;
    double height = 0.0;  // relative to the trion
};

struct DeviceSpectrum {
    std::vector<double> wavelength;  // nm, increasing
    std::vector<double> counts;
    std::vector<PeakAnnotation> truth;  ///< tagged lines placed by the generator
    std::vector<PeakAnnotation> extra;  ///< untagged bright lines of multi-peak devices (tag unused)
    bool two_peak = false;              ///< generator's intent
};

struct ArraySpectrumSet {
    std::vector<DeviceSpectrum> devices;
};

/// Device i draws from rng_substream(seed, i), so the set does not depend
/// on how devices are scheduled.
ArraySpectrumSet generate_array(std::size_t n_devices, const ArrayStatistics& stats, std::uint64_t seed);

struct DetectedPeak {
    double energy = 0.0;      // meV
    double wavelength = 0.0;  // nm
    double height = 0.0;      // counts above the baseline
    std::optional<ComplexTag> tag;  ///< only assigned for two_dominant spectra
};

struct Classification {
    bool two_dominant = false;
    bool multi_peak = false;
    std::vector<DetectedPeak> peaks;  ///< increasing energy
    /// Lower-energy dominant peak of a two_dominant spectrum.
    std::optional<double> trion_energy;  // meV
    bool no_emitter() const { return peaks.empty(); }
};

/// Local maxima above a noise floor (median + 6 sqrt(median + 1)) with
/// parabolic refinement. two_dominant iff exactly two peaks exceed
/// dominance_threshold x the tallest; multi_peak iff more than two do.
Classification classify_spectrum(const std::vector<double>& wavelength, const std::vector<double>& counts,
                                 double dominance_threshold = 0.25);

struct YieldReport {
    std::size_t n_devices = 0;
    std::size_t n_two_peak = 0;
    std::size_t n_no_emitter = 0;
    double mean_trion_energy = 0.0;  // meV, over two-peak devices
    double std_trion_energy = 0.0;   // meV
    std::vector<Classification> classifications;
};

YieldReport yield_report(const ArraySpectrumSet& set, double dominance_threshold = 0.25);

/// "wavelength_nm,counts" rows.
std::string spectrum_csv(const DeviceSpectrum& d);
/// Reads a "wavelength_nm,counts" file (header required).
DeviceSpectrum parse_spectrum_csv(std::string_view text);

}  // namespace photonstat::spectral
