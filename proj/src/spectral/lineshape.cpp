#include "photonstat/spectral/lineshape.hpp"

#include "photonstat/errors.hpp"
#include "photonstat/numerics/least_squares.hpp"
#include "photonstat/numerics/rng.hpp"
#include "photonstat/report.hpp"
#include "photonstat/spectral/voigt.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace photonstat::spectral {

namespace {

using boost::math::constants::pi;
using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();

double etalon_transmission(double d, double fwhm) {
    const double r = 2.0 * d / fwhm;
    return 1.0 / (1.0 + r * r);
}

double line_density(const TrueLine& line, double u) {
    return voigt(u - line.center, line.lorentzian_fwhm, line.gaussian_fwhm);
}

// Overlap of the line with the etalon centred at nu, split at the two peaks.
double overlap(const TrueLine& line, double etalon_fwhm, double nu) {
    auto f = [&](double u) { return line_density(line, u) * etalon_transmission(nu - u, etalon_fwhm); };
    const double a = std::min(line.center, nu), b = std::max(line.center, nu);
    auto gk = [&](double lo, double hi) { return gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-10); };
    double s = gk(-kInf, a) + gk(b, kInf);
    if (b > a) s += gk(a, b);
    return s;
}

double empirical_fwhm(const LineProfile& p, std::size_t peak) {
    const double half = 0.5 * p.intensities[peak];
    auto crossing = [&](int dir) {
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(peak);
        const auto n = static_cast<std::ptrdiff_t>(p.intensities.size());
        while (i + dir >= 0 && i + dir < n && p.intensities[static_cast<std::size_t>(i + dir)] > half) i += dir;
        if (i + dir < 0 || i + dir >= n) return p.detunings[static_cast<std::size_t>(i)];
        const double y0 = p.intensities[static_cast<std::size_t>(i)], y1 = p.intensities[static_cast<std::size_t>(i + dir)];
        const double x0 = p.detunings[static_cast<std::size_t>(i)], x1 = p.detunings[static_cast<std::size_t>(i + dir)];
        return x0 + (half - y0) / (y1 - y0) * (x1 - x0);
    };
    return crossing(1) - crossing(-1);
}

}  // namespace

std::string_view to_string(LineModel m) { return m == LineModel::Voigt ? "Voigt" : "Lorentzian"; }

LineProfile scan_etalon(const TrueLine& line, double etalon_fwhm, double step, double counts_per_point,
                        std::uint64_t seed) {
    if (!(etalon_fwhm > 0.0)) throw std::invalid_argument("scan_etalon: etalon_fwhm must be > 0");
    if (!(step > 0.0) || step > etalon_fwhm / 4.0) {
        throw std::invalid_argument("scan_etalon: step must be in (0, etalon_fwhm / 4]");
    }
    if (!(line.lorentzian_fwhm >= 0.0) || !(line.gaussian_fwhm >= 0.0) || !(counts_per_point >= 0.0)) {
        throw std::invalid_argument("scan_etalon: widths and counts must be >= 0");
    }
    const bool delta = line.lorentzian_fwhm == 0.0 && line.gaussian_fwhm == 0.0;
    auto expectation = [&](double nu) {
        return delta ? etalon_transmission(nu - line.center, etalon_fwhm) : overlap(line, etalon_fwhm, nu);
    };
    const double span = 6.0 * (line.lorentzian_fwhm + line.gaussian_fwhm + etalon_fwhm);
    const auto half_points = static_cast<std::int64_t>(std::floor(span / step));
    const double scale = counts_per_point / expectation(line.center);

    LineProfile p;
    p.true_line = line;
    numerics::RandomStream rng = numerics::rng_substream(seed, 0);
    for (std::int64_t k = -half_points; k <= half_points; ++k) {
        const double nu = line.center + static_cast<double>(k) * step;
        p.detunings.push_back(nu);
        p.intensities.push_back(static_cast<double>(rng.poisson(scale * expectation(nu))));
    }
    return p;
}

LinewidthReport fit_lineshape(const LineProfile& profile, double etalon_fwhm, const LineFitOptions& options) {
    const std::size_t n = profile.detunings.size();
    if (n < 8 || profile.intensities.size() != n) {
        throw AnalysisError("bad_input", "fit_lineshape: need at least 8 points with matching intensities");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(profile.detunings[i] > profile.detunings[i - 1])) {
            throw AnalysisError("bad_input", "fit_lineshape: detuning grid must increase strictly");
        }
    }
    if (!(etalon_fwhm >= 0.0)) throw AnalysisError("bad_input", "fit_lineshape: etalon_fwhm must be >= 0");
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(profile.intensities.begin(), profile.intensities.end()) - profile.intensities.begin());
    const double a0 = profile.intensities[peak];
    if (!(a0 > 0.0)) throw AnalysisError("bad_input", "fit_lineshape: profile is empty");
    const double c0 = profile.detunings[peak];
    const double w0 = std::max(empirical_fwhm(profile, peak), profile.detunings[1] - profile.detunings[0]);
    const double span = profile.detunings.back() - profile.detunings.front();
    const double fe = etalon_fwhm;

    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) weights[i] = 1.0 / std::max(profile.intensities[i], 1.0);
    const std::vector<double>& x = profile.detunings;

    numerics::FitProblem lor;
    lor.observed = profile.intensities;
    lor.weights = weights;
    lor.initial = {a0, c0, std::max(w0 - fe, 0.05 * w0)};
    lor.lower = {0.0, x.front(), 0.0};
    lor.upper = {kInf, x.back(), 10.0 * span};
    lor.names = {"amplitude", "center", "lorentzian_fwhm"};
    lor.max_iterations = 300;
    lor.model = [&](std::span<const double> p) {
        const double hw = 0.5 * (p[2] + fe);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[i] - p[1];
            f[i] = p[0] * hw * hw / (d * d + hw * hw);
        }
        return f;
    };
    const numerics::FitResult rl = numerics::least_squares(lor);
    if (!rl.converged) throw numerics::FitError("fit_lineshape: Lorentzian fit did not converge", rl.params);
    auto check_span = [&](double measured) {
        if (span < 3.0 * measured) {
            throw AnalysisError("span_too_narrow", "fit_lineshape: profile spans " + format_double(span) +
                                                       " GHz, less than 3 x the measured FWHM " +
                                                       format_double(measured) + " GHz");
        }
    };
    // Checked before the Voigt fits, which are slow on such data.
    check_span(rl.params[2] + fe);

    numerics::FitProblem vg;
    vg.observed = profile.intensities;
    vg.weights = weights;
    vg.lower = {0.0, x.front(), 0.0, 1e-6 * w0};
    vg.upper = {kInf, x.back(), 10.0 * span, 10.0 * span};
    vg.names = {"amplitude", "center", "lorentzian_fwhm", "gaussian_fwhm"};
    vg.max_iterations = 300;
    vg.model = [&](std::span<const double> p) {
        const double wl = p[2] + fe;
        const double norm = voigt(0.0, wl, p[3]);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = p[0] * voigt(x[i] - p[1], wl, p[3]) / norm;
        return f;
    };
    std::optional<numerics::FitResult> rv;
    const double gl = rl.params[2];
    const double wl_meas = gl + fe;
    for (auto [l_share, g_share] : {std::pair{0.7, 0.5}, std::pair{0.3, 1.0}, std::pair{0.05, 1.2}}) {
        vg.initial = {rl.params[0], rl.params[1], l_share * gl, std::max(g_share * std::max(gl, 0.3 * wl_meas), vg.lower[3])};
        try {
            numerics::FitResult r = numerics::least_squares(vg);
            if (r.converged && (!rv || r.chi2 < rv->chi2)) rv = std::move(r);
        } catch (const numerics::FitError&) {
            // The Gaussian width lost all influence; the Lorentzian stands.
        }
    }

    LinewidthReport rep;
    rep.etalon_fwhm = fe;
    rep.ssr_lorentzian = rl.chi2;
    rep.ssr_voigt = rv ? rv->chi2 : std::numeric_limits<double>::quiet_NaN();
    bool use_voigt = false;
    if (rv && rl.chi2 > 0.0) {
        const double frac = rv->params[3] / (rv->params[2] + rv->params[3]);
        use_voigt = (rl.chi2 - rv->chi2) / rl.chi2 > options.min_ssr_improvement && frac > options.min_gaussian_fraction;
    }
    if (use_voigt) {
        rep.model = LineModel::Voigt;
        rep.center = rv->params[1];
        rep.amplitude = rv->params[0];
        rep.deconvolved_fwhm = rv->params[2];
        rep.sigma_deconvolved = rv->sigma(2);
        rep.gaussian_fwhm = rv->params[3];
        rep.gaussian_fraction = rep.gaussian_fwhm / (rep.deconvolved_fwhm + rep.gaussian_fwhm);
        rep.measured_fwhm = voigt_fwhm(rep.deconvolved_fwhm + fe, rep.gaussian_fwhm);
    } else {
        rep.model = LineModel::Lorentzian;
        rep.center = rl.params[1];
        rep.amplitude = rl.params[0];
        rep.deconvolved_fwhm = rl.params[2];
        rep.sigma_deconvolved = rl.sigma(2);
        rep.measured_fwhm = rep.deconvolved_fwhm + fe;
    }
    rep.resolution_limited = fe > 0.0 && rep.deconvolved_fwhm < 0.1 * fe;
    check_span(rep.measured_fwhm);
    return rep;
}

double evaluate_fit(const LinewidthReport& report, double detuning) {
    const double wl = report.deconvolved_fwhm + report.etalon_fwhm;
    const double d = detuning - report.center;
    if (report.model == LineModel::Voigt) {
        return report.amplitude * voigt(d, wl, report.gaussian_fwhm) / voigt(0.0, wl, report.gaussian_fwhm);
    }
    if (wl == 0.0) return d == 0.0 ? report.amplitude : 0.0;
    const double hw = 0.5 * wl;
    return report.amplitude * hw * hw / (d * d + hw * hw);
}

CoherenceMetrics coherence_metrics(double deconvolved_fwhm, double lifetime_ns) {
    if (!(deconvolved_fwhm > 0.0) || !(lifetime_ns > 0.0)) {
        throw std::invalid_argument("coherence_metrics: linewidth and lifetime must be > 0");
    }
    CoherenceMetrics m;
    m.t2 = 1.0 / deconvolved_fwhm;
    m.transform_limit = 1.0 / (2.0 * pi<double>() * lifetime_ns);
    m.broadening_ratio = 2.0 * pi<double>() * deconvolved_fwhm * lifetime_ns;
    return m;
}

void coherence_metrics(LinewidthReport& report, double lifetime_ns) {
    const CoherenceMetrics m = coherence_metrics(report.deconvolved_fwhm, lifetime_ns);
    report.lifetime = lifetime_ns;
    report.t2 = m.t2;
    report.transform_limit = m.transform_limit;
    report.broadening_ratio = m.broadening_ratio;
}

std::string profile_csv(const LineProfile& profile) {
    std::string out = "detuning_ghz,counts\n";
    for (std::size_t i = 0; i < profile.detunings.size(); ++i) {
        out += format_double(profile.detunings[i]);
        out += ',';
        out += format_double(profile.intensities[i]);
        out += '\n';
    }
    return out;
}

LineProfile parse_profile_csv(std::string_view text) {
    LineProfile p;
    std::size_t start = 0, line_no = 0;
    bool header = false;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            header = true;
            if (line != "detuning_ghz,counts") throw std::invalid_argument("profile csv: expected header 'detuning_ghz,counts'");
            continue;
        }
        const auto comma = line.find(',');
        double v[2];
        std::string_view f[2] = {line.substr(0, comma), comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1)};
        for (int k = 0; k < 2; ++k) {
            const auto r = std::from_chars(f[k].data(), f[k].data() + f[k].size(), v[k]);
            if (comma == std::string_view::npos || r.ec != std::errc() || r.ptr != f[k].data() + f[k].size()) {
                throw std::invalid_argument("profile csv line " + std::to_string(line_no) + ": expected two numbers");
            }
        }
        p.detunings.push_back(v[0]);
        p.intensities.push_back(v[1]);
    }
    return p;
}

}  // namespace photonstat::spectral
