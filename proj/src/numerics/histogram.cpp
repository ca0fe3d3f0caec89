#include "photonstat/numerics/histogram.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace photonstat::numerics {

UniformHistogram::UniformHistogram(double origin_, double bin_width_, std::size_t n_bins)
    : origin(origin_), bin_width(bin_width_), counts(n_bins, 0) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("UniformHistogram: bin_width must be > 0");
}

std::optional<std::size_t> UniformHistogram::bin_of(double x) const {
    const double u = (x - origin) / bin_width;
    if (!(u >= 0.0)) return std::nullopt;
    const auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= counts.size()) return std::nullopt;
    return i;
}

bool UniformHistogram::fill(double x) {
    const auto i = bin_of(x);
    if (!i) return false;
    ++counts[*i];
    return true;
}

std::uint64_t UniformHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

MeanStd mean_std(std::span<const double> xs) {
    MeanStd r;
    r.n = xs.size();
    if (xs.empty()) return r;
    // Welford
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double x : xs) {
        ++k;
        const double d = x - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (x - mean);
    }
    r.mean = mean;
    r.std = xs.size() > 1 ? std::sqrt(m2 / static_cast<double>(xs.size() - 1)) : 0.0;
    return r;
}

}  // namespace photonstat::numerics
