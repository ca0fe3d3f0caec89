#pragma once

#include "photonstat/mc/engine.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace photonstat::tcspc {

/// Counts of pulse-relative arrival times; bin i covers [i w, (i + 1) w) ps.
struct DecayHistogram {
    double bin_width = 0.0;  // ps
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const;
    double bin_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * bin_width; }
};

/// Photon emission times (ps since their own pulse) inside [0, window).
DecayHistogram build_decay_histogram(std::span<const mc::PhotonRecord> photons, double bin_width, double window);

/// Click times folded onto the pulse period (t mod period), as a TCSPC card
/// referenced to the laser sync records them.
DecayHistogram build_decay_histogram(const mc::ClickStream& clicks, double period, double bin_width, double window);

struct DecayFitOptions {
    double fit_start = std::numeric_limits<double>::quiet_NaN();  ///< ps; NaN selects the peak bin
    double fit_end = std::numeric_limits<double>::quiet_NaN();    ///< ps; NaN selects the window end
    bool fit_background = false;
    std::uint64_t min_counts = 1000;  ///< statistical floor inside the fit range
    /// A second component is kept only if it lowers chi^2 by more than this.
    double min_chi2_improvement = 20.0;
    int max_iterations = 500;
};

/// a exp(-t / tau_fast) + b exp(-t / tau_slow) [+ background], t in ns from
/// the pulse.
struct DecayFit {
    double tau_fast = 0.0;          // ns
    double tau_slow = 0.0;          // ns; equals tau_fast when single_component
    double amplitude_fast = 0.0;    // counts/bin at t = 0
    double amplitude_slow = 0.0;    // counts/bin at t = 0
    double background = 0.0;        // counts/bin
    /// Parameter order: amplitude_fast, tau_fast, amplitude_slow, tau_slow
    /// [, background]; 2x2 (+1) when single_component.
    Eigen::MatrixXd covariance;
    double reduced_chi2 = 0.0;
    bool single_component = false;
    int iterations = 0;
    double fit_start = 0.0;  // ps
    double fit_end = 0.0;    // ps

    double sigma_tau_fast() const;
    double sigma_tau_slow() const;
};

/// Poisson-weighted (1 / max(count, 1)) least squares. Throws AnalysisError
/// below the count floor and numerics::FitError (carrying the last iterate)
/// when the fit does not converge.
DecayFit fit_biexponential(const DecayHistogram& hist, const DecayFitOptions& options = {});

}  // namespace photonstat::tcspc
