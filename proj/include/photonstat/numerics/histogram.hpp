#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace photonstat::numerics {

/// Bins [origin + i w, origin + (i + 1) w), i in [0, counts.size()).
struct UniformHistogram {
    double origin = 0.0;
    double bin_width = 1.0;
    std::vector<std::uint64_t> counts;

    UniformHistogram(double origin, double bin_width, std::size_t n_bins);

    std::optional<std::size_t> bin_of(double x) const;
    /// Returns false when x falls outside the histogram.
    bool fill(double x);
    double center(std::size_t i) const { return origin + (static_cast<double>(i) + 0.5) * bin_width; }
    std::uint64_t total() const;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation (n - 1)
    std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> xs);

/// Symmetric rounding of an integer delay to the nearest bin index; ties
/// round away from zero so that index(-d) == -index(d) exactly.
inline std::int64_t symmetric_bin_index(std::int64_t delay, std::int64_t bin_width) {
    const std::int64_t mag = delay < 0 ? -delay : delay;
    const std::int64_t k = (2 * mag + bin_width) / (2 * bin_width);
    return delay < 0 ? -k : k;
}

}  // namespace photonstat::numerics
