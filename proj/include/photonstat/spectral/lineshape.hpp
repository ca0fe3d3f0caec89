#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace photonstat::spectral {

struct TrueLine {
    double lorentzian_fwhm = 0.0;  // GHz
    double gaussian_fwhm = 0.0;    // GHz
    double center = 0.0;           // GHz detuning
};

struct LineProfile {
    std::vector<double> detunings;    // GHz, strictly increasing
    std::vector<double> intensities;  // counts
    std::optional<TrueLine> true_line;  ///< set by scan_etalon
};

/// Scans a Lorentzian etalon (transmission 1 / (1 + (2 d / etalon_fwhm)^2))
/// across the line. Each point's expectation is the numerically integrated
/// overlap of the true line with the transmission, scaled so the peak
/// expectation equals counts_per_point, and the recorded value is a Poisson
/// draw from rng_substream(seed, 0). Points run from center - 6 W to
/// center + 6 W, W = widths summed. Throws std::invalid_argument unless
/// etalon_fwhm > 0 and 0 < step <= etalon_fwhm / 4.
LineProfile scan_etalon(const TrueLine& line, double etalon_fwhm, double step, double counts_per_point,
                        std::uint64_t seed);

enum class LineModel { Lorentzian, Voigt };
std::string_view to_string(LineModel m);

struct LineFitOptions {
    /// Voigt is chosen only when it lowers the weighted SSR by more than
    /// this fraction...
    double min_ssr_improvement = 0.2;
    /// ...and its Gaussian share of the summed widths exceeds this.
    double min_gaussian_fraction = 0.2;
};

struct LinewidthReport {
    LineModel model = LineModel::Lorentzian;
    double measured_fwhm = 0.0;      // GHz, FWHM of the fitted measured profile
    double deconvolved_fwhm = 0.0;   // GHz, Lorentzian component (gamma)
    double sigma_deconvolved = 0.0;  // GHz
    double gaussian_fwhm = 0.0;      // GHz, 0 for the Lorentzian model
    double gaussian_fraction = 0.0;  ///< gaussian / (lorentzian + gaussian)
    double center = 0.0;             // GHz
    double amplitude = 0.0;          ///< counts at the fitted peak
    double etalon_fwhm = 0.0;        // GHz
    double ssr_lorentzian = 0.0;     ///< Poisson-weighted
    double ssr_voigt = 0.0;          ///< NaN when the Voigt fit failed
    bool resolution_limited = false;  ///< gamma below a tenth of the etalon width

    // Completed by coherence_metrics.
    std::optional<double> lifetime;           // ns
    std::optional<double> t2;                 // ns, 1 / gamma
    std::optional<double> transform_limit;    // GHz, 1 / (2 pi tau)
    std::optional<double> broadening_ratio;   // 2 pi gamma tau
};

/// Fits Lorentzian and Voigt models, each already convolved with the
/// etalon (a Lorentzian of etalon_fwhm adds its width to the Lorentzian
/// component), and selects between them. etalon_fwhm may be 0. Throws
/// AnalysisError when the profile spans less than 3 measured FWHM, and
/// numerics::FitError when the Lorentzian fit does not converge.
LinewidthReport fit_lineshape(const LineProfile& profile, double etalon_fwhm, const LineFitOptions& options = {});

/// The selected measured-profile model (etalon included) at `detuning`.
double evaluate_fit(const LinewidthReport& report, double detuning);

/// T2 = 1 / gamma (gamma in GHz gives ns), transform limit 1 / (2 pi tau)
/// and their ratio 2 pi gamma tau; the T2 convention is recorded in reports.
void coherence_metrics(LinewidthReport& report, double lifetime_ns);

struct CoherenceMetrics {
    double t2 = 0.0;
    double transform_limit = 0.0;
    double broadening_ratio = 0.0;
};
CoherenceMetrics coherence_metrics(double deconvolved_fwhm, double lifetime_ns);

/// "detuning_ghz,counts" rows.
std::string profile_csv(const LineProfile& profile);
LineProfile parse_profile_csv(std::string_view text);

}  // namespace photonstat::spectral
