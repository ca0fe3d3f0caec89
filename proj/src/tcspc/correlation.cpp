#include "photonstat/tcspc/correlation.hpp"

#include "photonstat/numerics/histogram.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace photonstat::tcspc {

namespace {

void sweep(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::int64_t bw, std::int64_t k_max,
           std::vector<std::uint64_t>& counts) {
    // Largest |delay| that still rounds into bin k_max.
    const std::int64_t reach = (2 * bw * (k_max + 1) - bw - 1) / 2;
    std::size_t lo = 0;
    for (std::uint64_t ta : a) {
        const auto t = static_cast<std::int64_t>(ta);
        while (lo < b.size() && static_cast<std::int64_t>(b[lo]) < t - reach) ++lo;
        for (std::size_t j = lo; j < b.size(); ++j) {
            const std::int64_t d = static_cast<std::int64_t>(b[j]) - t;
            if (d > reach) break;
            const std::int64_t k = numerics::symmetric_bin_index(d, bw);
            if (k >= -k_max && k <= k_max) ++counts[static_cast<std::size_t>(k + k_max)];
        }
    }
}

}  // namespace

std::uint64_t CorrelationHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

CorrelationHistogram correlate(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                               std::int64_t bin_width, std::int64_t window, std::optional<double> rep_period,
                               unsigned threads) {
    if (bin_width <= 0 || window <= 0) throw std::invalid_argument("correlate: bin_width and window must be > 0");
    if (!std::is_sorted(a.begin(), a.end())) throw std::invalid_argument("correlate: stream a is not sorted");
    if (!std::is_sorted(b.begin(), b.end())) throw std::invalid_argument("correlate: stream b is not sorted");

    CorrelationHistogram h;
    h.bin_width = bin_width;
    h.half_bins = window / bin_width;
    h.rep_period = rep_period;
    h.counts.assign(static_cast<std::size_t>(2 * h.half_bins + 1), 0);

    // Chunks of `a` are independent; integer sums make the merge exact.
    const unsigned n_threads = std::max(1u, std::min<unsigned>(mc::resolve_threads(threads),
                                                              static_cast<unsigned>(a.size() / 4096 + 1)));
    if (n_threads == 1) {
        sweep(a, b, bin_width, h.half_bins, h.counts);
        return h;
    }
    std::vector<std::vector<std::uint64_t>> partial(n_threads, std::vector<std::uint64_t>(h.counts.size(), 0));
    std::vector<std::thread> pool;
    const std::size_t chunk = (a.size() + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
        const std::size_t begin = std::min(a.size(), t * chunk);
        const std::size_t end = std::min(a.size(), begin + chunk);
        pool.emplace_back([&, t, begin, end] { sweep(a.subspan(begin, end - begin), b, bin_width, h.half_bins, partial[t]); });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < p.size(); ++i) h.counts[i] += p[i];
    }
    return h;
}

std::string correlation_csv(const CorrelationHistogram& hist) {
    std::string out = "delay_ps,counts\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        out += std::to_string((static_cast<std::int64_t>(i) - hist.half_bins) * hist.bin_width);
        out += ',';
        out += std::to_string(hist.counts[i]);
        out += '\n';
    }
    return out;
}

}  // namespace photonstat::tcspc
