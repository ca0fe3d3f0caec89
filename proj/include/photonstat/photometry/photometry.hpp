#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace photonstat::photometry {

struct SaturationPoint {
    double power = 0.0;  // relative units
    double rate = 0.0;   // cps
};

/// R(P) = rate_sat (1 - exp(-P / p_sat)).
struct SaturationCurve {
    std::vector<SaturationPoint> points;
    double rate_sat = 0.0;
    double p_sat = 0.0;
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  ///< order rate_sat, p_sat; scaled by the residual variance
    int iterations = 0;

    double sigma_rate_sat() const { return std::sqrt(covariance(0, 0)); }
    double sigma_p_sat() const { return std::sqrt(covariance(1, 1)); }
    double evaluate(double power) const;
};

/// Unweighted least squares. Needs >= 4 points with strictly increasing
/// powers and rates >= 0. Throws AnalysisError (kind "unconstrained",
/// message naming p_sat) when the data never bend over, i.e. when p_sat
/// runs to its bound or its relative uncertainty exceeds 1.
SaturationCurve fit_saturation(std::vector<SaturationPoint> points);

/// "power,rate" CSV with a header line; blank lines and '#' comments skipped.
std::vector<SaturationPoint> parse_saturation_csv(std::string_view text);

struct Efficiency {
    double value = 0.0;
    bool inconsistent = false;  ///< value > 1 (beyond rounding): more photons than pulses
};

/// detected_rate / (rep_rate eta_t eta_d). Throws std::invalid_argument when
/// the preconditions fail.
Efficiency source_efficiency(double detected_rate, double rep_rate, double eta_t, double eta_d);

/// detected_rate / (rep_rate eta_t eta_d directionality sideband_pass).
Efficiency collection_efficiency(double detected_rate, double rep_rate, double eta_t, double eta_d,
                                 double directionality, double sideband_pass);

struct EfficiencyReport {
    double detected_rate = 0.0;            // cps, selected line
    double detected_rate_all_lines = 0.0;  // cps
    double rep_rate = 0.0;                 // Hz
    double eta_t = 0.0;
    double eta_d = 0.0;
    double directionality = 0.0;
    double sideband_pass = 0.0;
    Efficiency source;
    Efficiency collection;
};

EfficiencyReport efficiency_report(double detected_rate, double detected_rate_all_lines, double rep_rate,
                                   double eta_t, double eta_d, double directionality, double sideband_pass);

struct RateComparison {
    double lifetime = 0.0;        // ns
    double emission_rate = 0.0;   // cps, 1 / lifetime
    double chain_product = 0.0;
    double detected_ceiling = 0.0;  // cps
    double measured_rate = 0.0;     // cps
    double ratio = 0.0;             ///< measured / ceiling; NaN when the ceiling is 0
};

RateComparison rate_comparison(double lifetime_ns, double cw_rate_at_sat, double chain_product);

}  // namespace photonstat::photometry
