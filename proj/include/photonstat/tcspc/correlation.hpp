#pragma once

#include "photonstat/mc/engine.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace photonstat::tcspc {

/// Coincidences binned by delay t_b - t_a. Bin i is centred on
/// (i - half_bins) * bin_width, so the span is symmetric about zero.
struct CorrelationHistogram {
    std::int64_t bin_width = 0;  // ps
    std::int64_t half_bins = 0;
    std::vector<std::uint64_t> counts;  ///< 2 half_bins + 1 entries
    std::optional<double> rep_period;   ///< ps; absent for CW data

    double delay(std::size_t i) const {
        return static_cast<double>((static_cast<std::int64_t>(i) - half_bins) * bin_width);
    }
    std::uint64_t total() const;
};

/// All pairwise delays t_b - t_a within +-window (inclusive, after rounding
/// to bins) from a sorted two-pointer sweep. Throws std::invalid_argument on
/// unsorted input or non-positive widths. `threads` = 0 uses the engine's
/// default; the result does not depend on it.
CorrelationHistogram correlate(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                               std::int64_t bin_width, std::int64_t window,
                               std::optional<double> rep_period = std::nullopt, unsigned threads = 0);

inline CorrelationHistogram correlate(const mc::ClickStream& a, const mc::ClickStream& b, std::int64_t bin_width,
                                      std::int64_t window, std::optional<double> rep_period = std::nullopt,
                                      unsigned threads = 0) {
    return correlate(a.timestamps, b.timestamps, bin_width, window, rep_period, threads);
}

/// "delay_ps,counts" rows.
std::string correlation_csv(const CorrelationHistogram& hist);

}  // namespace photonstat::tcspc
