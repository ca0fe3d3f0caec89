#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace photonstat::numerics {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

inline constexpr std::string_view kRngAlgorithm = "philox4x32-10";

/// Counter-based random stream. The key is the 64-bit run seed, the upper
/// half of the counter is the stream index and the lower half counts blocks,
/// so a (seed, index) pair names one reproducible sequence regardless of
/// which thread draws from it.
///
/// Single owner: never share a stream between concurrent tasks.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_index) noexcept;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1].
    double uniform_open() noexcept { return 1.0 - uniform(); }
    double exponential(double mean) noexcept;
    double normal(double mean, double sigma) noexcept;
    std::uint64_t poisson(double mean);
    bool bernoulli(double p) noexcept { return uniform() < p; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return index_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int cursor_ = 4;  // in 32-bit words; 4 means empty
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// Named entry point for deriving a substream.
inline RandomStream rng_substream(std::uint64_t seed, std::uint64_t stream_index) noexcept {
    return RandomStream(seed, stream_index);
}

}  // namespace photonstat::numerics
