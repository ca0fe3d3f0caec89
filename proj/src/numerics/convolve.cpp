#include "photonstat/numerics/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace photonstat::numerics {

double SampledProfile::area() const {
    if (values.size() < 2) return values.empty() ? 0.0 : values.front() * step;
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * step;
}

namespace {

void require_decayed(const SampledProfile& p, const char* which) {
    if (p.values.empty()) throw std::invalid_argument(std::string("convolve_profiles: empty profile ") + which);
    if (p.values.size() == 1) return;  // delta
    const double peak = *std::max_element(p.values.begin(), p.values.end(),
                                          [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double limit = 1e-6 * std::abs(peak);
    if (std::abs(p.values.front()) > limit || std::abs(p.values.back()) > limit) {
        throw std::invalid_argument(std::string("convolve_profiles: profile ") + which +
                                    " does not decay below 1e-6 of its peak at the grid edges");
    }
}

}  // namespace

SampledProfile convolve_profiles(const SampledProfile& f, const SampledProfile& g) {
    if (!(f.step > 0.0) || std::abs(f.step - g.step) > 1e-12 * f.step) {
        throw std::invalid_argument("convolve_profiles: grid mismatch (steps differ)");
    }
    require_decayed(f, "f");
    require_decayed(g, "g");
    const std::size_t nf = f.values.size();
    const std::size_t ng = g.values.size();
    SampledProfile out;
    out.step = f.step;
    out.origin = f.origin + g.origin;
    out.values.assign(nf + ng - 1, 0.0);
    // Riemann sum; equals the trapezoid rule when the edges have decayed.
    for (std::size_t i = 0; i < nf; ++i) {
        const double fi = f.values[i] * f.step;
        if (fi == 0.0) continue;
        double* dst = out.values.data() + i;
        for (std::size_t j = 0; j < ng; ++j) dst[j] += fi * g.values[j];
    }
    return out;
}

std::vector<double> convolve_same(std::span<const double> signal, std::span<const double> kernel) {
    if (kernel.empty() || kernel.size() % 2 == 0) {
        throw std::invalid_argument("convolve_same: kernel length must be odd");
    }
    const auto n = static_cast<std::ptrdiff_t>(signal.size());
    const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    std::vector<double> out(signal.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        double s = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) s += signal[static_cast<std::size_t>(j)] * kernel[static_cast<std::size_t>(i - j + half)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

std::vector<double> gaussian_kernel(double sigma_steps, double half_width_sigmas) {
    if (!(sigma_steps > 0.0)) return {1.0};
    const auto half = static_cast<std::size_t>(std::ceil(half_width_sigmas * sigma_steps));
    std::vector<double> k(2 * half + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double x = static_cast<double>(i) - static_cast<double>(half);
        k[i] = std::exp(-0.5 * x * x / (sigma_steps * sigma_steps));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

double fwhm(const SampledProfile& p) {
    if (p.values.size() < 3) throw std::invalid_argument("fwhm: profile too short");
    const auto peak_it = std::max_element(p.values.begin(), p.values.end());
    const std::size_t ip = static_cast<std::size_t>(peak_it - p.values.begin());
    const double half = 0.5 * *peak_it;
    std::size_t l = ip;
    while (l > 0 && p.values[l] > half) --l;
    std::size_t r = ip;
    while (r + 1 < p.values.size() && p.values[r] > half) ++r;
    if (p.values[l] > half || p.values[r] > half) {
        throw std::invalid_argument("fwhm: half maximum not reached inside the grid");
    }
    auto cross = [&](std::size_t a, std::size_t b) {
        const double ya = p.values[a];
        const double yb = p.values[b];
        const double t = (half - ya) / (yb - ya);
        return p.x(a) + t * (p.x(b) - p.x(a));
    };
    return cross(r - 1, r) - cross(l, l + 1);
}

}  // namespace photonstat::numerics
