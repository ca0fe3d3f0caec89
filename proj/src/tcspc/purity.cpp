#include "photonstat/tcspc/purity.hpp"

#include "photonstat/errors.hpp"
#include "photonstat/numerics/convolve.hpp"
#include "photonstat/numerics/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace photonstat::tcspc {

namespace {

constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

double period_of(const CorrelationHistogram& hist, std::optional<double> rep_period) {
    const std::optional<double> t = rep_period ? rep_period : hist.rep_period;
    if (!t || !(*t > 0.0)) {
        throw AnalysisError("no_period", "purity: histogram has no repetition period");
    }
    return *t;
}

void require_reach(const CorrelationHistogram& hist, double period, int n) {
    if (n < 1) throw AnalysisError("bad_argument", "purity: n_side_peaks must be >= 1");
    const double reach = static_cast<double>(hist.half_bins * hist.bin_width);
    if (reach + 0.5 * static_cast<double>(hist.bin_width) < (n + 0.5) * period) {
        throw AnalysisError("window_too_short", "purity: histogram spans +-" + std::to_string(reach) +
                                                    " ps, " + std::to_string(n) + " side peaks need +-" +
                                                    std::to_string((n + 0.5) * period) + " ps");
    }
}

double peak_area(const CorrelationHistogram& hist, double centre, double period) {
    double sum = 0.0;
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        const double d = hist.delay(i);
        if (d >= centre - 0.5 * period && d < centre + 0.5 * period) sum += static_cast<double>(hist.counts[i]);
    }
    return sum;
}

/// Bin-averaged (f * G) on a run of histogram bins. f is sampled on a fine
/// grid with `sub` points per bin plus 6 sigma of padding on both sides.
class JitteredBins {
public:
    JitteredBins(double first_centre, std::size_t n_bins, double bin_width, double sigma)
        : n_bins_(n_bins) {
        sub_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bin_width / 4.0)));
        step_ = bin_width / static_cast<double>(sub_);
        kernel_ = numerics::gaussian_kernel(sigma / step_);
        pad_ = kernel_.size() / 2;
        const double start = first_centre - 0.5 * bin_width + 0.5 * step_ - static_cast<double>(pad_) * step_;
        x_.resize(n_bins * sub_ + 2 * pad_);
        for (std::size_t j = 0; j < x_.size(); ++j) x_[j] = start + static_cast<double>(j) * step_;
    }

    template <typename F>
    std::vector<double> evaluate(F&& f) const {
        std::vector<double> raw(x_.size());
        for (std::size_t j = 0; j < x_.size(); ++j) raw[j] = f(x_[j]);
        const std::vector<double> smooth = kernel_.size() > 1 ? numerics::convolve_same(raw, kernel_) : raw;
        std::vector<double> out(n_bins_, 0.0);
        for (std::size_t i = 0; i < n_bins_; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < sub_; ++k) s += smooth[pad_ + i * sub_ + k];
            out[i] = s / static_cast<double>(sub_);
        }
        return out;
    }

private:
    std::size_t n_bins_;
    std::size_t sub_ = 1;
    double step_ = 1.0;
    std::size_t pad_ = 0;
    std::vector<double> kernel_;
    std::vector<double> x_;
};

struct ZeroWindow {
    std::size_t first = 0;  // bin index of the first bin with centre >= -T/2
    std::size_t count = 0;
};

ZeroWindow zero_window(const CorrelationHistogram& hist, double period) {
    ZeroWindow w;
    bool found = false;
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        const double d = hist.delay(i);
        if (d >= -0.5 * period && d < 0.5 * period) {
            if (!found) w.first = i;
            found = true;
            ++w.count;
        }
    }
    return w;
}

}  // namespace

PurityReport purity_from_histogram(const CorrelationHistogram& hist, int n_side_peaks, std::optional<double> rep_period) {
    const double period = period_of(hist, rep_period);
    require_reach(hist, period, n_side_peaks);

    PurityReport r;
    r.n_side_peaks = n_side_peaks;
    r.rep_period = period;
    r.zero_peak_area = peak_area(hist, 0.0, period);
    double side = 0.0;
    for (int m = 1; m <= n_side_peaks; ++m) {
        side += peak_area(hist, m * period, period) + peak_area(hist, -m * period, period);
    }
    const double n2 = 2.0 * n_side_peaks;
    r.mean_side_peak_area = side / n2;
    if (!(r.mean_side_peak_area > 0.0)) {
        throw AnalysisError("zero_side_peaks", "purity: side peaks are empty, cannot normalise");
    }
    const double z = r.zero_peak_area;
    const double s = r.mean_side_peak_area;
    r.g2_zero = z / s;
    r.purity = 1.0 - r.g2_zero;
    // Poisson error on Z (floored at one count) and on the side-peak mean.
    r.uncertainty = std::sqrt(std::max(z, 1.0) / (s * s) + z * z / (n2 * s * s * s));
    return r;
}

DipFit fit_dip_time(const CorrelationHistogram& hist, double jitter_fwhm, int n_side_peaks,
                    std::optional<double> rep_period) {
    const double period = period_of(hist, rep_period);
    require_reach(hist, period, n_side_peaks);
    if (!(jitter_fwhm >= 0.0)) throw AnalysisError("bad_argument", "fit_dip_time: jitter_fwhm must be >= 0");
    const double bw = static_cast<double>(hist.bin_width);
    const double sigma = std::sqrt(2.0) * jitter_fwhm * kFwhmToSigma;
    const double n2 = 2.0 * n_side_peaks;

    const ZeroWindow zw = zero_window(hist, period);
    if (zw.count < 8) throw AnalysisError("too_few_bins", "fit_dip_time: fewer than 8 bins per period");
    const double first_centre = hist.delay(zw.first);

    // Side peaks folded onto the zero window. Non-integer periods (in bins)
    // are folded with the shift rounded to the nearest bin.
    std::vector<double> folded(zw.count, 0.0);
    for (int m = -n_side_peaks; m <= n_side_peaks; ++m) {
        if (m == 0) continue;
        const auto shift = static_cast<std::ptrdiff_t>(std::llround(m * period / bw));
        for (std::size_t j = 0; j < zw.count; ++j) {
            const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(zw.first + j) + shift;
            if (i < 0 || i >= static_cast<std::ptrdiff_t>(hist.counts.size())) {
                throw AnalysisError("window_too_short", "fit_dip_time: side peak runs past the histogram");
            }
            folded[j] += static_cast<double>(hist.counts[static_cast<std::size_t>(i)]);
        }
    }
    std::vector<double> zero(zw.count);
    double zero_sum = 0.0;
    for (std::size_t j = 0; j < zw.count; ++j) {
        zero[j] = static_cast<double>(hist.counts[zw.first + j]);
        zero_sum += zero[j];
    }
    auto poisson_weights = [](const std::vector<double>& y) {
        std::vector<double> w(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) w[i] = 1.0 / std::max(y[i], 1.0);
        return w;
    };

    const JitteredBins grid(first_centre, zw.count, bw, sigma);

    // Stage 1: side-peak envelope B exp(-|t| / tau_e) with its neighbours, plus background.
    double edge = 0.0;
    std::size_t n_edge = 0;
    for (std::size_t j = 0; j < zw.count; ++j) {
        if (std::abs(first_centre + bw * static_cast<double>(j)) > 0.4 * period) {
            edge += folded[j];
            ++n_edge;
        }
    }
    const double folded_sum = std::accumulate(folded.begin(), folded.end(), 0.0);
    if (folded_sum < 100.0 * n2) {
        throw AnalysisError("insufficient_counts", "fit_dip_time: " + std::to_string(static_cast<long long>(folded_sum)) +
                                                       " side-peak coincidences, need at least " +
                                                       std::to_string(static_cast<long long>(100.0 * n2)));
    }
    const double bg0 = n_edge ? edge / static_cast<double>(n_edge) / n2 : 0.0;
    const double peak0 = *std::max_element(folded.begin(), folded.end()) / n2 - bg0;
    if (!(peak0 > 0.0)) throw AnalysisError("zero_side_peaks", "fit_dip_time: side peaks are empty");
    double net = 0.0;
    for (double v : folded) net += v / n2 - bg0;
    const double tau0 = std::clamp(net * bw / (2.0 * peak0), bw, 0.5 * period);

    numerics::FitProblem side;
    side.observed = folded;
    side.weights = poisson_weights(folded);
    side.initial = {peak0, tau0, bg0};
    side.lower = {0.0, 0.1 * bw, 0.0};
    side.upper = {std::numeric_limits<double>::infinity(), period, std::numeric_limits<double>::infinity()};
    side.names = {"side_amplitude", "tau_envelope", "background"};
    side.max_iterations = 300;
    side.model = [&](std::span<const double> p) {
        const double b = p[0], tau = p[1], bg = p[2];
        std::vector<double> f = grid.evaluate([&](double x) {
            return b * (std::exp(-std::abs(x) / tau) + std::exp(-std::abs(x - period) / tau) +
                        std::exp(-std::abs(x + period) / tau));
        });
        for (double& v : f) v = n2 * (v + bg);
        return f;
    };
    const numerics::FitResult s1 = numerics::least_squares(side);
    if (!s1.converged) throw numerics::FitError("fit_dip_time: side-peak fit did not converge", s1.params);
    const double b_side = s1.params[0], tau_e = s1.params[1], bg = s1.params[2];

    DipFit out;
    out.tau_envelope = tau_e;
    out.side_amplitude = b_side;
    out.background = bg;

    // Contributions to the zero window that are not the zero peak itself.
    const std::vector<double> floor = grid.evaluate([&](double x) {
        return b_side * (std::exp(-std::abs(x - period) / tau_e) + std::exp(-std::abs(x + period) / tau_e));
    });
    double expected_floor = 0.0;
    for (double v : floor) expected_floor += v + bg;
    const double zero_net = zero_sum - expected_floor;
    if (zero_sum < 30.0 || zero_net < 5.0 * std::sqrt(zero_sum + 1.0)) {
        out.tau_dip = std::numeric_limits<double>::quiet_NaN();
        out.sigma_tau_dip = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    // Stage 2: zero peak with tau_e, side amplitude and background held.
    numerics::FitProblem zp;
    zp.observed = zero;
    zp.weights = poisson_weights(zero);
    zp.lower = {0.0, 0.05 * bw};
    zp.upper = {std::numeric_limits<double>::infinity(), 10.0 * tau_e};
    zp.names = {"zero_amplitude", "tau_dip"};
    zp.max_iterations = 300;
    zp.model = [&](std::span<const double> p) {
        const double a = p[0], td = p[1];
        std::vector<double> f = grid.evaluate([&](double x) {
            const double ax = std::abs(x);
            return a * std::exp(-ax / tau_e) * -std::expm1(-ax / td);
        });
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += floor[i] + bg;
        return f;
    };
    std::optional<numerics::FitResult> best;
    std::vector<double> last;
    for (double td0 : {20.0, 50.0, 150.0, 500.0}) {
        // Amplitude start from the net area with the dip's area deficit removed.
        const double a0 = zero_net * bw / (2.0 * (tau_e - tau_e * td0 / (tau_e + td0)));
        zp.initial = {std::max(a0, 1.0), std::clamp(td0, zp.lower[1], zp.upper[1])};
        try {
            numerics::FitResult r = numerics::least_squares(zp);
            last = r.params;
            if (r.converged && (!best || r.chi2 < best->chi2)) best = std::move(r);
        } catch (const numerics::FitError& e) {
            last = e.last_params();
        }
    }
    if (!best) throw numerics::FitError("fit_dip_time: zero-peak fit did not converge from any start", last);

    out.resolved = true;
    out.zero_amplitude = best->params[0];
    out.tau_dip = best->params[1];
    out.sigma_tau_dip = best->sigma(1);
    out.reduced_chi2 = best->reduced_chi2;
    // Analytic areas of the jitter-free models.
    const double td = out.tau_dip;
    const double zero_area = 2.0 * out.zero_amplitude * (tau_e - tau_e * td / (tau_e + td));
    const double side_area = 2.0 * b_side * tau_e;
    out.g2_zero_deconvolved = side_area > 0.0 ? zero_area / side_area : 0.0;
    return out;
}

G2Analysis analyze_g2(const CorrelationHistogram& hist, int n_side_peaks, std::optional<double> jitter_fwhm) {
    G2Analysis a;
    a.purity = purity_from_histogram(hist, n_side_peaks);
    if (jitter_fwhm) {
        a.dip = fit_dip_time(hist, *jitter_fwhm, n_side_peaks);
        a.purity.g2_zero_deconvolved = a.dip->g2_zero_deconvolved;
        if (a.dip->resolved) a.purity.reexcitation_time = a.dip->tau_dip;
    }
    return a;
}

}  // namespace photonstat::tcspc
