#include "photonstat/photometry/photometry.hpp"

#include "photonstat/errors.hpp"
#include "photonstat/numerics/least_squares.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace photonstat::photometry {

namespace {

bool in_unit(double x) { return x > 0.0 && x <= 1.0; }

double parse_field(std::string_view s, std::size_t line) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("saturation csv line " + std::to_string(line) + ": cannot parse '" +
                                    std::string(s) + "'");
    }
    return v;
}

}  // namespace

double SaturationCurve::evaluate(double power) const { return rate_sat * -std::expm1(-power / p_sat); }

SaturationCurve fit_saturation(std::vector<SaturationPoint> points) {
    if (points.size() < 4) throw AnalysisError("too_few_points", "fit_saturation: need at least 4 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].rate >= 0.0) || !std::isfinite(points[i].rate) || !std::isfinite(points[i].power) ||
            (i > 0 && !(points[i].power > points[i - 1].power))) {
            throw AnalysisError("bad_input", "fit_saturation: powers must increase strictly and rates be >= 0");
        }
    }
    const double p_max = points.back().power;
    const double r_max = std::max_element(points.begin(), points.end(), [](auto& a, auto& b) { return a.rate < b.rate; })->rate;
    if (!(r_max > 0.0) || !(p_max > 0.0)) throw AnalysisError("bad_input", "fit_saturation: all rates are zero");

    // P_sat start: first power whose rate passes 63% of the maximum.
    double p0 = points[points.size() / 2].power;
    for (const auto& pt : points) {
        if (pt.rate >= 0.63 * r_max) {
            p0 = std::max(pt.power, 1e-3 * p_max);
            break;
        }
    }
    const double p_hi = 1e3 * p_max;

    numerics::FitProblem prob;
    for (const auto& pt : points) prob.observed.push_back(pt.rate);
    prob.initial = {r_max, p0};
    prob.lower = {0.0, 1e-6 * p_max};
    prob.upper = {std::numeric_limits<double>::infinity(), p_hi};
    prob.names = {"rate_sat", "p_sat"};
    prob.max_iterations = 500;
    prob.model = [&points](std::span<const double> x) {
        std::vector<double> f(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) f[i] = x[0] * -std::expm1(-points[i].power / x[1]);
        return f;
    };
    numerics::FitResult r;
    try {
        r = numerics::least_squares(prob);
    } catch (const numerics::FitError& e) {
        throw AnalysisError("unconstrained", std::string("fit_saturation: p_sat is not constrained by the data (") +
                                                 e.what() + ")");
    }
    const double dof = static_cast<double>(points.size()) - 2.0;
    const double s2 = r.chi2 / dof;
    SaturationCurve c;
    c.points = std::move(points);
    c.rate_sat = r.params[0];
    c.p_sat = r.params[1];
    c.covariance = r.covariance.topLeftCorner<2, 2>() * s2;
    c.iterations = r.iterations;
    if (c.p_sat >= 0.999 * p_hi || c.sigma_p_sat() > c.p_sat) {
        throw AnalysisError("unconstrained",
                            "fit_saturation: p_sat is not constrained by the data; no points above the knee");
    }
    if (!r.converged) {
        throw AnalysisError("no_convergence", "fit_saturation: no convergence after " +
                                                  std::to_string(r.iterations) + " iterations");
    }
    return c;
}

std::vector<SaturationPoint> parse_saturation_csv(std::string_view text) {
    std::vector<SaturationPoint> out;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (line != "power,rate") throw std::invalid_argument("saturation csv: expected header 'power,rate'");
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw std::invalid_argument("saturation csv line " + std::to_string(line_no) + ": expected 2 fields");
        }
        out.push_back({parse_field(line.substr(0, comma), line_no), parse_field(line.substr(comma + 1), line_no)});
        if (end == text.size()) break;
    }
    return out;
}

Efficiency source_efficiency(double detected_rate, double rep_rate, double eta_t, double eta_d) {
    if (!(detected_rate >= 0.0) || !(rep_rate > 0.0) || !in_unit(eta_t) || !in_unit(eta_d)) {
        throw std::invalid_argument("source_efficiency: need rate >= 0, rep_rate > 0 and eta_t, eta_d in (0, 1]");
    }
    Efficiency e;
    e.value = detected_rate / (rep_rate * eta_t * eta_d);
    e.inconsistent = e.value > 1.0 + 1e-12;
    return e;
}

Efficiency collection_efficiency(double detected_rate, double rep_rate, double eta_t, double eta_d,
                                 double directionality, double sideband_pass) {
    if (!in_unit(directionality) || !in_unit(sideband_pass)) {
        throw std::invalid_argument("collection_efficiency: directionality and sideband_pass must be in (0, 1]");
    }
    Efficiency e = source_efficiency(detected_rate, rep_rate, eta_t, eta_d);
    e.value /= directionality * sideband_pass;
    e.inconsistent = e.value > 1.0 + 1e-12;
    return e;
}

EfficiencyReport efficiency_report(double detected_rate, double detected_rate_all_lines, double rep_rate,
                                   double eta_t, double eta_d, double directionality, double sideband_pass) {
    EfficiencyReport r;
    r.detected_rate = detected_rate;
    r.detected_rate_all_lines = detected_rate_all_lines;
    r.rep_rate = rep_rate;
    r.eta_t = eta_t;
    r.eta_d = eta_d;
    r.directionality = directionality;
    r.sideband_pass = sideband_pass;
    r.source = source_efficiency(detected_rate, rep_rate, eta_t, eta_d);
    r.collection = collection_efficiency(detected_rate_all_lines, rep_rate, eta_t, eta_d, directionality, sideband_pass);
    return r;
}

RateComparison rate_comparison(double lifetime_ns, double cw_rate_at_sat, double chain_product) {
    if (!(lifetime_ns > 0.0)) throw std::invalid_argument("rate_comparison: lifetime must be > 0");
    RateComparison r;
    r.lifetime = lifetime_ns;
    r.emission_rate = 1e9 / lifetime_ns;
    r.chain_product = chain_product;
    r.detected_ceiling = r.emission_rate * chain_product;
    r.measured_rate = cw_rate_at_sat;
    r.ratio = r.detected_ceiling > 0.0 ? cw_rate_at_sat / r.detected_ceiling : std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace photonstat::photometry
