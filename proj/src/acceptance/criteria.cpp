#include "photonstat/acceptance/criteria.hpp"

#include "photonstat/mc/engine.hpp"
#include "photonstat/mc/stream_io.hpp"
#include "photonstat/numerics/convolve.hpp"
#include "photonstat/photometry/photometry.hpp"
#include "photonstat/report.hpp"
#include "photonstat/spectral/array.hpp"
#include "photonstat/spectral/lineshape.hpp"
#include "photonstat/spectral/voigt.hpp"
#include "photonstat/tcspc/correlation.hpp"
#include "photonstat/tcspc/decay.hpp"
#include "photonstat/tcspc/purity.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace photonstat::acceptance {

namespace {

using nlohmann::json;

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

// Accumulates sub-checks; the criterion passes when all of them do.
class Checks {
public:
    explicit Checks(double scale) : scale_(scale) {}

    void within(const std::string& name, double value, double target, double tol) {
        const double t = tol * scale_;
        add(name, std::abs(value - target) <= t, name + "=" + fmt(value) + " (want " + fmt(target) + "+-" + fmt(t) + ")");
        values_[name] = value;
    }
    void below(const std::string& name, double value, double limit) {
        const double l = limit * scale_;
        add(name, value < l, name + "=" + fmt(value) + " (want <" + fmt(l) + ")");
        values_[name] = value;
    }
    void expect(const std::string& name, bool ok, const std::string& text) {
        add(name, ok, text);
        values_[name] = ok;
    }
    void value(const std::string& name, const json& v) { values_[name] = v; }

    bool passed() const { return passed_; }
    std::string detail() const {
        std::string out;
        for (const auto& s : parts_) out += (out.empty() ? "" : "; ") + s;
        return out;
    }
    json values() const { return values_; }

private:
    void add(const std::string& name, bool ok, const std::string& text) {
        passed_ = passed_ && ok;
        parts_.push_back((ok ? "" : "[x] ") + text);
        (void)name;
    }

    double scale_;
    bool passed_ = true;
    std::vector<std::string> parts_;
    json values_ = json::object();
};

mc::PulsedResult run_pulsed(const ExperimentConfig& c, unsigned threads, bool keep_photons = false) {
    mc::SimulationOptions o;
    o.keep_photons = keep_photons;
    o.threads = threads;
    return mc::simulate_pulsed(c, o);
}

constexpr std::int64_t kHbtBin = 20;  // ps

tcspc::G2Analysis hbt(const ExperimentConfig& c, unsigned threads, bool fit_dip) {
    const mc::PulsedResult r = run_pulsed(c, threads);
    const double period = c.excitation.period_ps();
    const auto window = static_cast<std::int64_t>(std::llround(11.0 * period));
    const tcspc::CorrelationHistogram h = tcspc::correlate(r.streams.at(0), r.streams.at(1), kHbtBin, window, period, threads);
    return tcspc::analyze_g2(h, 10, fit_dip ? std::optional<double>(c.detectors[0].jitter_fwhm) : std::nullopt);
}

void c1(Checks& k) {
    const auto s = photometry::source_efficiency(220e3, 80e6, 0.078, 0.15);
    const auto c = photometry::collection_efficiency(247e3, 80e6, 0.078, 0.15, 0.5, 0.8);
    k.within("source_efficiency", s.value, 0.235, 0.001);
    k.within("collection_efficiency", c.value, 0.660, 0.005);
}

void c2(Checks& k) {
    const auto m = spectral::coherence_metrics(0.77, 1.7);
    k.within("transform_limit_ghz", m.transform_limit, 0.094, 0.001);
    k.within("broadening_ratio", m.broadening_ratio, 8.2, 0.1);
    k.within("t2_ns_at_0.4ghz", spectral::coherence_metrics(0.4, 1.7).t2, 2.5, 1e-12);
}

void c3(Checks& k) {
    const auto lor = spectral::scan_etalon({0.77, 0.0, 0.0}, 1.3, 0.1, 1e4, 3001);
    const auto rl = spectral::fit_lineshape(lor, 1.3);
    k.expect("lorentzian_model", rl.model == spectral::LineModel::Lorentzian,
             "model=" + std::string(spectral::to_string(rl.model)) + " (want Lorentzian)");
    k.within("deconvolved_fwhm_ghz", rl.deconvolved_fwhm, 0.77, 0.05);
    k.value("measured_fwhm_ghz", rl.measured_fwhm);

    const auto vg = spectral::scan_etalon({0.5, 0.5, 0.0}, 1.3, 0.1, 1e4, 3002);
    const auto rv = spectral::fit_lineshape(vg, 1.3);
    k.expect("voigt_model", rv.model == spectral::LineModel::Voigt,
             "model=" + std::string(spectral::to_string(rv.model)) + " (want Voigt)");
    k.within("gaussian_fraction", rv.gaussian_fraction, 0.5, 0.1);
}

void c4(Checks& k, const Options& o) {
    const ExperimentConfig c = lifetime_scenario(4e6);
    const mc::PulsedResult r = run_pulsed(c, o.threads);
    const double period = c.excitation.period_ps();
    const tcspc::DecayHistogram h = tcspc::build_decay_histogram(r.streams.at(0), period, 100.0, period);
    tcspc::DecayFitOptions fo;
    fo.fit_start = 500.0;
    fo.fit_end = period - 500.0;
    const tcspc::DecayFit f = tcspc::fit_biexponential(h, fo);
    const double clicks = static_cast<double>(r.streams[0].timestamps.size());
    k.expect("detected_photons", clicks >= 1e6, "clicks=" + fmt(clicks) + " (want >=1e6)");
    k.expect("two_components", !f.single_component, f.single_component ? "single component selected" : "two components");
    k.within("tau_fast_rel_error", f.tau_fast / 1.5 - 1.0, 0.0, 0.05);
    k.within("tau_slow_rel_error", f.tau_slow / 30.0 - 1.0, 0.0, 0.05);
    k.value("tau_fast_ns", f.tau_fast);
    k.value("tau_slow_ns", f.tau_slow);
}

void c5(Checks& k, const Options& o) {
    // (a) recapture off
    const auto off = hbt(purity_scenario(0.0, 1.0, 1e7), o.threads, false);
    k.below("g2_no_recapture", off.purity.g2_zero, 0.01);

    // (b) recapture tuned to a purity near 96% at saturation
    const auto tuned = hbt(purity_scenario(0.39, 1.0, 4e7), o.threads, true);
    k.within("purity_at_psat", tuned.purity.purity, 0.96, 0.01);
    const double tau_dip = tuned.dip && tuned.dip->resolved ? tuned.dip->tau_dip : NAN;
    k.within("tau_dip_ps", tau_dip, 50.0, 10.0);
    if (tuned.purity.g2_zero_deconvolved) k.value("g2_deconvolved", *tuned.purity.g2_zero_deconvolved);

    // (c) purity does not fall as the power drops
    const auto half = hbt(purity_scenario(0.39, 0.5, 4e7), o.threads, false);
    const auto low = hbt(purity_scenario(0.39, 0.1, 4e7), o.threads, false);
    const double p1 = tuned.purity.purity, p05 = half.purity.purity, p01 = low.purity.purity;
    k.expect("purity_monotone", p01 >= p05 && p05 >= p1,
             "purity(P=1,0.5,0.1)=" + fmt(p1) + "," + fmt(p05) + "," + fmt(p01) + " (want non-decreasing)");

    // (d) the reported device spread is reachable within the model: strong
    // recapture on a short-lifetime dot and weak recapture on a nominal one.
    ExperimentConfig strong = purity_scenario(1.0, 1.0, 4e6);
    strong.emitter.tau_fast = 1.0;
    const auto worst = hbt(strong, o.threads, false);
    const auto best = hbt(purity_scenario(0.02, 1.0, 4e6), o.threads, false);
    k.expect("band_attainable", worst.purity.purity <= 0.882 && best.purity.purity >= 0.994,
             "sweep spans purity " + fmt(worst.purity.purity) + ".." + fmt(best.purity.purity) +
                 " (want <=0.882 and >=0.994)");
}

void c6(Checks& k, const Options& o) {
    ExperimentConfig c = nominal_device();
    c.duration = 1.0;
    c.detectors = {DetectorSpec{1.0, 0.0, 0.0}, DetectorSpec{1.0, 0.0, 0.0}};
    const double rate = 1e6;
    mc::ClickStream a0, b0;
    b0.detector_id = 1;
    const mc::ClickStream a = mc::merge_background(a0, rate, c);
    const mc::ClickStream b = mc::merge_background(b0, rate, c);

    const double period = 25000.0;
    const tcspc::CorrelationHistogram h = tcspc::correlate(a, b, 1000, 275000, std::nullopt, o.threads);
    const tcspc::PurityReport p = tcspc::purity_from_histogram(h, 10, period);
    k.within("g2_poisson_sigmas", (p.g2_zero - 1.0) / p.uncertainty, 0.0, 5.0);

    // Per-bin flatness against the exact expectation for uniform streams.
    const double na = static_cast<double>(a.timestamps.size()), nb = static_cast<double>(b.timestamps.size());
    const double span = c.duration * 1e12;
    double worst = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double mu = na * nb * static_cast<double>(h.bin_width) * (span - std::abs(h.delay(i))) / (span * span);
        worst = std::max(worst, std::abs(static_cast<double>(h.counts[i]) - mu) / std::sqrt(mu));
    }
    k.below("max_bin_deviation_sigmas", worst, 5.0);
}

numerics::SampledProfile sampled(double step, double half_span, const std::function<double(double)>& f) {
    numerics::SampledProfile p;
    const auto n = static_cast<std::size_t>(std::llround(half_span / step));
    p.step = step;
    p.origin = -static_cast<double>(n) * step;
    for (std::size_t i = 0; i <= 2 * n; ++i) p.values.push_back(f(p.x(i)));
    return p;
}

void c7(Checks& k) {
    const double step = 0.05;
    const auto l1 = sampled(step, 600.0, [](double x) { return spectral::lorentzian(x, 1.0); });
    const auto l2 = sampled(step, 800.0, [](double x) { return spectral::lorentzian(x, 1.3); });
    k.within("lorentzian_width_rel_error", numerics::fwhm(numerics::convolve_profiles(l1, l2)) / 2.3 - 1.0, 0.0, 0.01);

    const double f1 = 2.0 * std::sqrt(2.0 * std::log(2.0)), f2 = 2.0 * f1;  // sigma 1 and 2
    const auto g1 = sampled(0.01, 8.0, [&](double x) { return spectral::gaussian(x, f1); });
    const auto g2 = sampled(0.01, 14.0, [&](double x) { return spectral::gaussian(x, f2); });
    k.within("gaussian_width_rel_error", numerics::fwhm(numerics::convolve_profiles(g1, g2)) / (std::sqrt(5.0) * f1) - 1.0,
             0.0, 0.01);

    numerics::SampledProfile delta;
    delta.step = g2.step;
    delta.origin = 0.0;
    delta.values = {1.0 / g2.step};
    const auto id = numerics::convolve_profiles(delta, g2);
    double max_err = 0.0;
    for (std::size_t i = 0; i < g2.values.size(); ++i) max_err = std::max(max_err, std::abs(id.values[i] - g2.values[i]));
    k.expect("delta_identity", id.values.size() == g2.values.size() && id.origin == g2.origin && max_err <= 1e-12,
             "delta * g max error " + fmt(max_err) + " (want exact)");
}

void c8(Checks& k) {
    spectral::ArrayStatistics st;
    const auto set = spectral::generate_array(100, st, 8001);
    const auto y = spectral::yield_report(set, 0.25);
    k.within("mean_trion_energy_mev", y.mean_trion_energy, 1264.0, 2.0);
    k.within("std_trion_energy_mev", y.std_trion_energy, 6.0, 1.5);
    k.within("n_two_peak", static_cast<double>(y.n_two_peak), 72.0, 5.0 * std::sqrt(100.0 * 0.72 * 0.28));
}

struct RunDigests {
    std::vector<std::string> streams;
    std::string photons;
    std::string report;
    std::string array;
    bool operator==(const RunDigests&) const = default;
};

RunDigests determinism_run(unsigned threads) {
    ExperimentConfig c = nominal_device();
    c.excitation.recapture_probability_at_sat = 0.3;
    c.detectors = {DetectorSpec{0.5, 200.0, 0.0}, DetectorSpec{0.5, 200.0, 5.0}};
    c.chain.transmission = 1.0;
    c.duration = 2.5e6 / c.excitation.rep_rate;  // three partitions
    const mc::PulsedResult r = run_pulsed(c, threads, true);
    RunDigests d;
    for (const auto& s : r.streams) d.streams.push_back(sha256_hex(mc::encode_click_stream(s)));
    d.photons = sha256_hex(mc::photons_csv(r.photons));

    const double period = c.excitation.period_ps();
    const auto h = tcspc::correlate(r.streams[0], r.streams[1], 50, 11 * static_cast<std::int64_t>(period), period, threads);
    const auto p = tcspc::purity_from_histogram(h, 10);
    json result = {{"g2_zero", p.g2_zero}, {"uncertainty", p.uncertainty}, {"histogram", sha256_hex(tcspc::correlation_csv(h))}};
    d.report = sha256_hex(dump_json(make_report("g2", result, {r.streams[0].config_digest, c.rng_seed})));

    std::string spectra;
    for (const auto& dev : spectral::generate_array(20, {}, 9001).devices) spectra += spectral::spectrum_csv(dev);
    d.array = sha256_hex(spectra);
    return d;
}

void c9(Checks& k) {
    const RunDigests one = determinism_run(1);
    const RunDigests again = determinism_run(1);
    const RunDigests many = determinism_run(3);
    k.expect("repeat_identical", one == again, one == again ? "repeat run byte-identical" : "repeat run differs");
    k.expect("threads_identical", one == many,
             one == many ? "1 vs 3 threads byte-identical" : "1 vs 3 threads differ");
    k.value("stream0_sha256", one.streams.at(0));
}

const std::map<std::string, std::function<void(Checks&, const Options&)>>& runners() {
    static const std::map<std::string, std::function<void(Checks&, const Options&)>> m = {
        {"C1", [](Checks& k, const Options&) { c1(k); }},
        {"C2", [](Checks& k, const Options&) { c2(k); }},
        {"C3", [](Checks& k, const Options&) { c3(k); }},
        {"C4", c4},
        {"C5", c5},
        {"C6", c6},
        {"C7", [](Checks& k, const Options&) { c7(k); }},
        {"C8", [](Checks& k, const Options&) { c8(k); }},
        {"C9", [](Checks& k, const Options&) { c9(k); }},
    };
    return m;
}

}  // namespace

std::string CriterionResult::status() const { return excluded ? "N/A" : (passed ? "PASS" : "FAIL"); }

std::string CriterionResult::line() const { return id + " " + status() + " " + title + ": " + detail; }

const std::vector<CriterionInfo>& criteria() {
    static const std::vector<CriterionInfo> list = {
        {"C1", "efficiency arithmetic"},
        {"C2", "coherence metrics"},
        {"C3", "linewidth round-trip"},
        {"C4", "lifetime round-trip"},
        {"C5", "single-photon purity"},
        {"C6", "Poissonian oracle"},
        {"C7", "convolution oracles"},
        {"C8", "array yield round-trip"},
        {"C9", "determinism"},
        {"C10", "excluded: absolute rates, linewidth distribution, broadening spread"},
    };
    return list;
}

ExperimentConfig purity_scenario(double recapture_at_sat, double power_ratio, double pulses) {
    ExperimentConfig c = nominal_device();
    c.excitation.rep_rate = 40e6;
    c.excitation.power_ratio = power_ratio;
    c.excitation.recapture_probability_at_sat = recapture_at_sat;
    c.emitter.slow_branch_fraction = 0.0;
    c.chain.beta = c.chain.directionality = c.chain.sideband_pass = c.chain.transmission = 1.0;
    c.detectors = {DetectorSpec{1.0, 200.0, 0.0}, DetectorSpec{1.0, 200.0, 0.0}};
    c.duration = pulses / c.excitation.rep_rate;
    return c;
}

ExperimentConfig lifetime_scenario(double pulses) {
    ExperimentConfig c = nominal_device();
    c.excitation.rep_rate = 10e6;
    c.emitter.slow_branch_fraction = 0.1;
    c.emitter.tau_slow = 30.0;
    c.chain.beta = c.chain.directionality = c.chain.sideband_pass = c.chain.transmission = 1.0;
    c.detectors = {DetectorSpec{1.0, 200.0, 0.0}};
    c.duration = pulses / c.excitation.rep_rate;
    return c;
}

CriterionResult run_criterion(const std::string& id, const Options& options) {
    const auto& list = criteria();
    const auto info = std::find_if(list.begin(), list.end(), [&](const CriterionInfo& c) { return c.id == id; });
    if (info == list.end()) throw std::invalid_argument("unknown criterion '" + id + "'");

    CriterionResult r;
    r.id = info->id;
    r.title = info->title;
    if (id == "C10") {
        r.excluded = true;
        r.passed = true;
        r.detail = "per-device chain factors, the linewidth generative law and a phonon dephasing model are not "
                   "available; covered by C1-C9 instead";
        r.values = json::object();
        return r;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Checks k(options.tolerance_scale);
    try {
        runners().at(id)(k, options);
        r.passed = k.passed();
        r.detail = k.detail();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = k.detail() + (k.detail().empty() ? "" : "; ") + "error: " + e.what();
    }
    r.values = k.values();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CriterionResult> run_suite(const std::vector<std::string>& ids, const Options& options) {
    std::vector<CriterionResult> out;
    if (ids.empty()) {
        for (const auto& c : criteria()) out.push_back(run_criterion(c.id, options));
    } else {
        for (const auto& id : ids) out.push_back(run_criterion(id, options));
    }
    return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.excluded || r.passed; });
}

json results_json(const std::vector<CriterionResult>& results, const Options& options) {
    json rows = json::array();
    for (const auto& r : results) {
        rows.push_back({{"id", r.id},
                        {"title", r.title},
                        {"status", r.status()},
                        {"detail", r.detail},
                        {"seconds", r.seconds},
                        {"values", r.values}});
    }
    return {{"tolerance_scale", options.tolerance_scale}, {"all_passed", all_passed(results)}, {"criteria", rows}};
}

}  // namespace photonstat::acceptance
