#include "photonstat/tcspc/decay.hpp"

#include "photonstat/errors.hpp"
#include "photonstat/numerics/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace photonstat::tcspc {

using numerics::FitError;
using numerics::FitProblem;
using numerics::FitResult;

namespace {

DecayHistogram empty_histogram(double bin_width, double window) {
    if (!(bin_width > 0.0) || !(window > 0.0)) {
        throw std::invalid_argument("build_decay_histogram: bin_width and window must be > 0");
    }
    DecayHistogram h;
    h.bin_width = bin_width;
    h.counts.assign(static_cast<std::size_t>(std::ceil(window / bin_width)), 0);
    return h;
}

void add_time(DecayHistogram& h, double t, double window) {
    if (!(t >= 0.0) || !(t < window)) return;
    const auto i = static_cast<std::size_t>(t / h.bin_width);
    if (i < h.counts.size()) ++h.counts[i];
}

struct LogLine {
    double slope = 0.0;
    double intercept = 0.0;
    bool ok = false;
};

// Weighted fit of ln(y) = intercept + slope t with weights y.
LogLine log_linear(std::span<const double> t, std::span<const double> y) {
    double sw = 0, st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        const double w = y[i];
        const double l = std::log(y[i]);
        sw += w;
        st += w * t[i];
        sl += w * l;
        stt += w * t[i] * t[i];
        stl += w * t[i] * l;
    }
    const double det = sw * stt - st * st;
    LogLine r;
    if (sw <= 0.0 || !(std::abs(det) > 0.0)) return r;
    r.slope = (sw * stl - st * sl) / det;
    r.intercept = (sl - r.slope * st) / sw;
    r.ok = std::isfinite(r.slope) && std::isfinite(r.intercept);
    return r;
}

struct FitData {
    std::vector<double> t;  // ns, bin centres
    std::vector<double> y;
    std::vector<double> w;
    double bin_ns = 0.0;
    double span_ns = 0.0;
};

FitResult run_fit(const FitData& d, std::vector<double> init, std::vector<double> lo, std::vector<double> hi,
                  std::vector<std::string> names, int components, bool background, int max_iter) {
    FitProblem p;
    p.observed = d.y;
    p.weights = d.w;
    for (std::size_t i = 0; i < init.size(); ++i) init[i] = std::clamp(init[i], lo[i], hi[i]);
    p.initial = std::move(init);
    p.lower = std::move(lo);
    p.upper = std::move(hi);
    p.names = std::move(names);
    p.max_iterations = max_iter;
    p.tolerance = 1e-9;
    const std::vector<double>& t = d.t;
    p.model = [&t, components, background](std::span<const double> x) {
        std::vector<double> f(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            double v = x[0] * std::exp(-t[i] / x[1]);
            if (components == 2) v += x[2] * std::exp(-t[i] / x[3]);
            if (background) v += x[components == 2 ? 4 : 2];
            f[i] = v;
        }
        return f;
    };
    return numerics::least_squares(p);
}

}  // namespace

std::uint64_t DecayHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double DecayFit::sigma_tau_fast() const { return covariance.rows() > 1 ? std::sqrt(std::max(0.0, covariance(1, 1))) : NAN; }
double DecayFit::sigma_tau_slow() const {
    if (single_component) return sigma_tau_fast();
    return covariance.rows() > 3 ? std::sqrt(std::max(0.0, covariance(3, 3))) : NAN;
}

DecayHistogram build_decay_histogram(std::span<const mc::PhotonRecord> photons, double bin_width, double window) {
    DecayHistogram h = empty_histogram(bin_width, window);
    for (const auto& p : photons) add_time(h, p.emission_time, window);
    return h;
}

DecayHistogram build_decay_histogram(const mc::ClickStream& clicks, double period, double bin_width, double window) {
    if (!(period > 0.0)) throw std::invalid_argument("build_decay_histogram: period must be > 0");
    DecayHistogram h = empty_histogram(bin_width, window);
    for (std::uint64_t ts : clicks.timestamps) add_time(h, std::fmod(static_cast<double>(ts), period), window);
    return h;
}

DecayFit fit_biexponential(const DecayHistogram& hist, const DecayFitOptions& opt) {
    if (hist.counts.empty() || !(hist.bin_width > 0.0)) {
        throw AnalysisError("insufficient_counts", "fit_biexponential: empty histogram");
    }
    std::size_t first;
    if (std::isnan(opt.fit_start)) {
        first = static_cast<std::size_t>(std::max_element(hist.counts.begin(), hist.counts.end()) - hist.counts.begin());
    } else {
        first = static_cast<std::size_t>(std::max(0.0, std::ceil(opt.fit_start / hist.bin_width - 0.5)));
    }
    std::size_t last = hist.counts.size();
    if (!std::isnan(opt.fit_end)) {
        last = std::min(last, static_cast<std::size_t>(std::floor(opt.fit_end / hist.bin_width - 0.5)) + 1);
    }
    if (first >= last || last - first < 8) {
        throw AnalysisError("insufficient_counts", "fit_biexponential: fit range covers fewer than 8 bins");
    }

    FitData d;
    d.bin_ns = hist.bin_width * 1e-3;
    std::uint64_t in_range = 0;
    for (std::size_t i = first; i < last; ++i) {
        d.t.push_back(hist.bin_center(i) * 1e-3);
        const double y = static_cast<double>(hist.counts[i]);
        d.y.push_back(y);
        d.w.push_back(1.0 / std::max(y, 1.0));
        in_range += hist.counts[i];
    }
    if (in_range < opt.min_counts) {
        throw AnalysisError("insufficient_counts", "fit_biexponential: " + std::to_string(in_range) +
                                                       " counts in the fit range, below the floor of " +
                                                       std::to_string(opt.min_counts));
    }
    d.span_ns = d.t.back() - d.t.front();
    const std::size_t n = d.t.size();
    const double y_max = *std::max_element(d.y.begin(), d.y.end());
    const double tau_min = d.bin_ns / 10.0;
    const double tau_max = 1e3 * std::max(d.span_ns, d.bin_ns);
    const bool bg = opt.fit_background;

    // Tail slope from the last half, then the early slope after removing
    // the tail.
    const std::size_t half = n / 2;
    const LogLine tail = log_linear(std::span(d.t).subspan(half), std::span(d.y).subspan(half));
    double tau_s0 = tail.ok && tail.slope < 0.0 ? -1.0 / tail.slope : 10.0 * d.span_ns;
    double b0 = tail.ok ? std::exp(tail.intercept) : 0.0;
    std::vector<double> early(n);
    for (std::size_t i = 0; i < n; ++i) early[i] = d.y[i] - b0 * std::exp(-d.t[i] / tau_s0);
    const std::size_t quarter = std::max<std::size_t>(4, n / 4);
    const LogLine head = log_linear(std::span(d.t).first(quarter), std::span(early).first(quarter));
    double tau_f0 = head.ok && head.slope < 0.0 ? -1.0 / head.slope : d.span_ns / 10.0;
    double a0 = head.ok ? std::exp(head.intercept) : y_max;
    if (!(tau_f0 < tau_s0)) {
        tau_f0 = std::min(tau_s0, d.span_ns) / 10.0;
        a0 = y_max * std::exp(d.t.front() / tau_f0);
    }

    // Single component, always computed: it is the reference for deciding
    // whether the data support a second one.
    const LogLine all = log_linear(d.t, d.y);
    const double tau_m0 = all.ok && all.slope < 0.0 ? -1.0 / all.slope : d.span_ns;
    const double a_m0 = all.ok ? std::exp(all.intercept) : y_max;
    std::vector<double> lo1{0.0, tau_min}, hi1{INFINITY, tau_max};
    std::vector<std::string> names1{"amplitude", "tau"};
    std::vector<double> init1{a_m0, tau_m0};
    if (bg) {
        lo1.push_back(0.0);
        hi1.push_back(y_max);
        names1.push_back("background");
        init1.push_back(0.0);
    }
    const FitResult mono = run_fit(d, init1, lo1, hi1, names1, 1, bg, opt.max_iterations);

    std::vector<double> lo2{0.0, tau_min, 0.0, tau_min}, hi2{INFINITY, tau_max, INFINITY, tau_max};
    std::vector<std::string> names2{"amplitude_fast", "tau_fast", "amplitude_slow", "tau_slow"};
    if (bg) {
        lo2.push_back(0.0);
        hi2.push_back(y_max);
        names2.push_back("background");
    }
    // The log-linear start misjudges the tail when tau_slow is short against
    // the window, so two starts spread around the single-component result
    // are tried as well.
    const double a_m = mono.params[0], tau_m = mono.params[1];
    std::vector<std::vector<double>> starts{{a0, tau_f0, b0, tau_s0},
                                            {a_m, 0.8 * tau_m, 0.05 * a_m, 4.0 * tau_m},
                                            {a_m, 0.6 * tau_m, 0.2 * a_m, 1.8 * tau_m}};
    std::optional<FitResult> bi;
    for (auto& init2 : starts) {
        if (bg) init2.push_back(0.0);
        try {
            FitResult r = run_fit(d, init2, lo2, hi2, names2, 2, bg, opt.max_iterations);
            if (r.converged && (!bi || r.chi2 < bi->chi2)) bi = std::move(r);
        } catch (const FitError&) {
            // A collapsed component leaves its partner parameter without
            // effect; another start or the single component stands.
        }
    }

    DecayFit out;
    out.fit_start = static_cast<double>(first) * hist.bin_width;
    out.fit_end = static_cast<double>(last) * hist.bin_width;
    const bool use_bi = bi && mono.chi2 - bi->chi2 > opt.min_chi2_improvement && bi->params[0] > 0.0 &&
                        bi->params[2] > 0.0;
    if (use_bi) {
        std::vector<double> p = bi->params;
        Eigen::MatrixXd cov = bi->covariance;
        if (p[1] > p[3]) {
            // Keep tau_fast <= tau_slow by swapping the two components.
            std::swap(p[0], p[2]);
            std::swap(p[1], p[3]);
            Eigen::PermutationMatrix<Eigen::Dynamic> perm(cov.rows());
            perm.setIdentity();
            perm.indices()[0] = 2;
            perm.indices()[1] = 3;
            perm.indices()[2] = 0;
            perm.indices()[3] = 1;
            cov = perm * cov * perm.transpose();
        }
        out.amplitude_fast = p[0];
        out.tau_fast = p[1];
        out.amplitude_slow = p[2];
        out.tau_slow = p[3];
        out.background = bg ? p[4] : 0.0;
        out.covariance = cov;
        out.reduced_chi2 = bi->reduced_chi2;
        out.iterations = bi->iterations;
        return out;
    }
    if (!mono.converged) {
        throw FitError("fit_biexponential: fit did not converge in " + std::to_string(mono.iterations) +
                           " iterations",
                       mono.params);
    }
    out.single_component = true;
    out.amplitude_fast = mono.params[0];
    out.tau_fast = mono.params[1];
    out.tau_slow = mono.params[1];
    out.amplitude_slow = 0.0;
    out.background = bg ? mono.params[2] : 0.0;
    out.covariance = mono.covariance;
    out.reduced_chi2 = mono.reduced_chi2;
    out.iterations = mono.iterations;
    return out;
}

}  // namespace photonstat::tcspc
