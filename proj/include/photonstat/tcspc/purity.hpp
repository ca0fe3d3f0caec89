#pragma once

#include "photonstat/tcspc/correlation.hpp"

#include <optional>

namespace photonstat::tcspc {

struct PurityReport {
    double g2_zero = 0.0;
    double purity = 1.0;  ///< 1 - g2_zero
    double zero_peak_area = 0.0;       // counts
    double mean_side_peak_area = 0.0;  // counts
    double uncertainty = 0.0;          ///< one sigma on g2_zero, Poisson
    int n_side_peaks = 0;
    double rep_period = 0.0;  // ps
    /// Filled by analyze_g2 when a jitter width is given and the dip fit
    /// resolves a zero-delay peak.
    std::optional<double> reexcitation_time;    // ps
    /// Jitter-free ratio of the fitted zero-peak and side-peak models.
    std::optional<double> g2_zero_deconvolved;
};

/// g2(0) as the zero-peak area over the mean of the 2 n side-peak areas.
/// Peak m collects the bins whose centres fall in [m T - T/2, m T + T/2).
/// `rep_period` overrides hist.rep_period (needed for CW histograms, where
/// it sets the normalisation window). Throws AnalysisError when the
/// histogram does not reach the outermost side peaks or the side peaks are
/// empty.
PurityReport purity_from_histogram(const CorrelationHistogram& hist, int n_side_peaks = 10,
                                   std::optional<double> rep_period = std::nullopt);

struct DipFit {
    /// False when the zero-delay peak is not significant above background;
    /// then tau_dip is NaN and g2_zero_deconvolved is 0.
    bool resolved = false;
    double tau_dip = 0.0;        // ps
    double sigma_tau_dip = 0.0;  // ps
    double tau_envelope = 0.0;   // ps, side-peak decay constant
    double zero_amplitude = 0.0;  // counts/bin of the undipped envelope at 0
    double side_amplitude = 0.0;  // counts/bin at the side-peak centre, before jitter
    double background = 0.0;      // counts/bin
    double g2_zero_deconvolved = 0.0;
    double reduced_chi2 = 0.0;
};

/// Forward-model fit of the zero-delay peak,
///   A exp(-|t| / tau_e) (1 - exp(-|t| / tau_dip)),
/// convolved with the coincidence response of two detectors that each have
/// `jitter_fwhm` Gaussian jitter (so sqrt(2) wider than one detector).
/// tau_e, the side-peak amplitude and the flat background come from a first
/// fit of the side peaks folded onto one period. Throws numerics::FitError
/// when no start converges.
DipFit fit_dip_time(const CorrelationHistogram& hist, double jitter_fwhm, int n_side_peaks = 10,
                    std::optional<double> rep_period = std::nullopt);

struct G2Analysis {
    PurityReport purity;
    std::optional<DipFit> dip;
};

/// Purity report plus, when jitter_fwhm is given, the dip fit (whose
/// results are copied into the report).
G2Analysis analyze_g2(const CorrelationHistogram& hist, int n_side_peaks, std::optional<double> jitter_fwhm);

}  // namespace photonstat::tcspc
