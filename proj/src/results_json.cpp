#include "photonstat/results_json.hpp"

#include <cmath>

namespace photonstat {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json opt(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_floating_point_v<T>) return num(*v);
    return json(*v);
}

json matrix(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

json to_json(const mc::StageCounts& s) {
    return {{"emitted", s.emitted},         {"coupled", s.coupled},       {"directed", s.directed},
            {"zero_phonon", s.zero_phonon}, {"filtered", s.filtered},     {"transmitted", s.transmitted},
            {"detected", s.detected},       {"jittered", s.jittered},     {"clicks", s.clicks}};
}

json to_json(const tcspc::DecayFit& f) {
    return {{"single_component", f.single_component},
            {"tau_fast_ns", num(f.tau_fast)},
            {"sigma_tau_fast_ns", num(f.sigma_tau_fast())},
            {"tau_slow_ns", num(f.tau_slow)},
            {"sigma_tau_slow_ns", num(f.sigma_tau_slow())},
            {"amplitude_fast", num(f.amplitude_fast)},
            {"amplitude_slow", num(f.amplitude_slow)},
            {"background", num(f.background)},
            {"reduced_chi2", num(f.reduced_chi2)},
            {"iterations", f.iterations},
            {"fit_start_ps", num(f.fit_start)},
            {"fit_end_ps", num(f.fit_end)},
            {"covariance", matrix(f.covariance)}};
}

json to_json(const tcspc::PurityReport& p) {
    return {{"g2_zero", num(p.g2_zero)},
            {"purity", num(p.purity)},
            {"uncertainty", num(p.uncertainty)},
            {"zero_peak_area", num(p.zero_peak_area)},
            {"mean_side_peak_area", num(p.mean_side_peak_area)},
            {"n_side_peaks", p.n_side_peaks},
            {"rep_period_ps", num(p.rep_period)},
            {"reexcitation_time_ps", opt(p.reexcitation_time)},
            {"g2_zero_deconvolved", opt(p.g2_zero_deconvolved)}};
}

json to_json(const tcspc::DipFit& d) {
    return {{"resolved", d.resolved},
            {"tau_dip_ps", num(d.tau_dip)},
            {"sigma_tau_dip_ps", num(d.sigma_tau_dip)},
            {"tau_envelope_ps", num(d.tau_envelope)},
            {"zero_amplitude", num(d.zero_amplitude)},
            {"side_amplitude", num(d.side_amplitude)},
            {"background", num(d.background)},
            {"g2_zero_deconvolved", num(d.g2_zero_deconvolved)},
            {"reduced_chi2", num(d.reduced_chi2)}};
}

json to_json(const photometry::SaturationCurve& c) {
    return {{"rate_sat_cps", num(c.rate_sat)},
            {"sigma_rate_sat_cps", num(c.sigma_rate_sat())},
            {"p_sat", num(c.p_sat)},
            {"sigma_p_sat", num(c.sigma_p_sat())},
            {"iterations", c.iterations},
            {"n_points", c.points.size()}};
}

json to_json(const photometry::EfficiencyReport& e) {
    return {{"detected_rate_cps", num(e.detected_rate)},
            {"detected_rate_all_lines_cps", num(e.detected_rate_all_lines)},
            {"rep_rate_hz", num(e.rep_rate)},
            {"eta_t", num(e.eta_t)},
            {"eta_d", num(e.eta_d)},
            {"directionality", num(e.directionality)},
            {"sideband_pass", num(e.sideband_pass)},
            {"source_efficiency", num(e.source.value)},
            {"source_inconsistent", e.source.inconsistent},
            {"collection_efficiency", num(e.collection.value)},
            {"collection_inconsistent", e.collection.inconsistent}};
}

json to_json(const spectral::LinewidthReport& r) {
    return {{"model", std::string(spectral::to_string(r.model))},
            {"measured_fwhm_ghz", num(r.measured_fwhm)},
            {"deconvolved_fwhm_ghz", num(r.deconvolved_fwhm)},
            {"sigma_deconvolved_ghz", num(r.sigma_deconvolved)},
            {"gaussian_fwhm_ghz", num(r.gaussian_fwhm)},
            {"gaussian_fraction", num(r.gaussian_fraction)},
            {"center_ghz", num(r.center)},
            {"amplitude", num(r.amplitude)},
            {"etalon_fwhm_ghz", num(r.etalon_fwhm)},
            {"ssr_lorentzian", num(r.ssr_lorentzian)},
            {"ssr_voigt", num(r.ssr_voigt)},
            {"resolution_limited", r.resolution_limited},
            {"lifetime_ns", opt(r.lifetime)},
            {"t2_ns", opt(r.t2)},
            {"t2_convention", "T2 = 1 / gamma"},
            {"transform_limit_ghz", opt(r.transform_limit)},
            {"broadening_ratio", opt(r.broadening_ratio)}};
}

json to_json(const spectral::Classification& c) {
    json peaks = json::array();
    for (const auto& p : c.peaks) {
        peaks.push_back({{"energy_mev", num(p.energy)},
                         {"wavelength_nm", num(p.wavelength)},
                         {"height", num(p.height)},
                         {"tag", p.tag ? json(std::string(to_string(*p.tag))) : json(nullptr)}});
    }
    return {{"two_dominant", c.two_dominant},
            {"multi_peak", c.multi_peak},
            {"no_emitter", c.no_emitter()},
            {"trion_energy_mev", opt(c.trion_energy)},
            {"peaks", peaks}};
}

json to_json(const spectral::YieldReport& y) {
    json devices = json::array();
    for (const auto& c : y.classifications) devices.push_back(to_json(c));
    return {{"n_devices", y.n_devices},
            {"n_two_peak", y.n_two_peak},
            {"n_no_emitter", y.n_no_emitter},
            {"two_peak_fraction", y.n_devices ? num(static_cast<double>(y.n_two_peak) / static_cast<double>(y.n_devices)) : json(nullptr)},
            {"mean_trion_energy_mev", num(y.mean_trion_energy)},
            {"std_trion_energy_mev", num(y.std_trion_energy)},
            {"devices", devices}};
}

}  // namespace photonstat
