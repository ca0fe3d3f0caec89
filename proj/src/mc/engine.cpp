#include "photonstat/mc/engine.hpp"

#include "photonstat/model_json.hpp"
#include "photonstat/numerics/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace photonstat::mc {

using numerics::RandomStream;

namespace {

constexpr std::uint64_t kBackgroundStreamBase = 1ull << 62;
constexpr double kPsPerNs = 1e3;

StageCounts& add(StageCounts& a, const StageCounts& b) {
    a.emitted += b.emitted;
    a.coupled += b.coupled;
    a.directed += b.directed;
    a.zero_phonon += b.zero_phonon;
    a.filtered += b.filtered;
    a.transmitted += b.transmitted;
    a.detected += b.detected;
    a.jittered += b.jittered;
    a.clicks += b.clicks;
    return a;
}

void require_valid(const ExperimentConfig& config) {
    const auto violations = validate(config);
    if (!violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += " " + v.field + " " + v.rule + ";";
        throw SimulationError(msg);
    }
}

/// Per-photon propagation through the optical chain and detectors.
class DetectionChain {
public:
    explicit DetectionChain(const ExperimentConfig& c) : chain_(c.chain) {
        for (const ChargeComplex& cc : c.emitter.complexes) passes_.push_back(c.chain.passes(cc.emission_energy));
        for (const DetectorSpec& d : c.detectors) {
            efficiency_.push_back(d.efficiency);
            sigma_ps_.push_back(d.jitter_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))));
        }
    }

    std::size_t detector_count() const { return efficiency_.size(); }

    /// `t_abs` is the true emission time in absolute ps.
    void propagate(RandomStream& rng, double t_abs, std::size_t complex_index, StageCounts& st,
                   std::vector<std::vector<std::int64_t>>& clicks) const {
        ++st.emitted;
        if (!rng.bernoulli(chain_.beta)) return;
        ++st.coupled;
        if (!rng.bernoulli(chain_.directionality)) return;
        ++st.directed;
        if (!rng.bernoulli(chain_.sideband_pass)) return;
        ++st.zero_phonon;
        if (!passes_[complex_index]) return;
        ++st.filtered;
        if (!rng.bernoulli(chain_.transmission)) return;
        ++st.transmitted;
        // Beam splitter: each photon independently picks one output port.
        const std::size_t det = efficiency_.size() == 1 ? 0 : static_cast<std::size_t>(rng.below(efficiency_.size()));
        if (!rng.bernoulli(efficiency_[det])) return;
        ++st.detected;
        const double t = sigma_ps_[det] > 0.0 ? t_abs + rng.normal(0.0, sigma_ps_[det]) : t_abs;
        const double rounded = std::nearbyint(t);
        if (rounded < 0.0) return;
        ++st.jittered;
        clicks[det].push_back(static_cast<std::int64_t>(rounded));
    }

private:
    OpticalChain chain_;
    std::vector<bool> passes_;
    std::vector<double> efficiency_;
    std::vector<double> sigma_ps_;
};

class ComplexPicker {
public:
    explicit ComplexPicker(const std::vector<ChargeComplex>& complexes) {
        double acc = 0.0;
        for (const ChargeComplex& c : complexes) {
            acc += c.relative_intensity;
            cumulative_.push_back(acc);
        }
        for (double& v : cumulative_) v /= acc;
    }
    std::size_t pick(RandomStream& rng) const {
        if (cumulative_.size() == 1) return 0;
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

struct PartitionOutput {
    std::vector<PhotonRecord> photons;
    std::vector<std::vector<std::int64_t>> clicks;
    StageCounts stages;
    std::uint64_t excitations = 0;
    std::uint64_t blocked = 0;
};

template <typename Fn>
void run_partitions(std::size_t n_parts, unsigned threads, Fn&& work) {
    const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n_parts));
    if (n_workers <= 1) {
        for (std::size_t p = 0; p < n_parts; ++p) work(p);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t p = next.fetch_add(1); p < n_parts; p = next.fetch_add(1)) work(p);
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<ClickStream> finish_streams(const ExperimentConfig& config,
                                        std::vector<std::vector<std::int64_t>>&& raw, StageCounts& st) {
    const std::string digest = config_digest(config);
    std::vector<ClickStream> out(raw.size());
    for (std::size_t d = 0; d < raw.size(); ++d) {
        auto& times = raw[d];
        std::sort(times.begin(), times.end());
        const auto dead_ps = static_cast<std::int64_t>(std::llround(config.detectors[d].dead_time * kPsPerNs));
        ClickStream& s = out[d];
        s.detector_id = static_cast<std::uint16_t>(d);
        s.config_digest = digest;
        s.timestamps.reserve(times.size());
        bool have_last = false;
        std::int64_t last = 0;
        for (std::int64_t t : times) {
            if (have_last && t - last < dead_ps) continue;
            s.timestamps.push_back(static_cast<std::uint64_t>(t));
            last = t;
            have_last = true;
        }
        st.clicks += s.timestamps.size();
        std::vector<std::int64_t>().swap(times);
    }
    return out;
}

}  // namespace

StageCounts& StageCounts::operator+=(const StageCounts& o) { return add(*this, o); }

unsigned resolve_threads(unsigned requested) {
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PHOTONSTAT_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

double cw_excitation_rate(const ExperimentConfig& c) {
    return std::expm1(c.excitation.power_ratio) / (c.emitter.tau_fast * kPsPerNs);
}

PulsedResult simulate_pulsed(const ExperimentConfig& config, const SimulationOptions& options) {
    if (config.excitation.mode != ExcitationMode::Pulsed) {
        throw SimulationError("simulate_pulsed: config is not in pulsed mode");
    }
    if (!(config.duration > 0.0)) throw SimulationError("simulate_pulsed: duration must be > 0");
    require_valid(config);

    const std::uint64_t n_pulses = config.pulse_count();
    if (n_pulses == 0) throw SimulationError("simulate_pulsed: duration covers no pulse");
    const std::size_t n_parts = static_cast<std::size_t>((n_pulses + kPulsesPerPartition - 1) / kPulsesPerPartition);

    const EmitterSpec& em = config.emitter;
    const double period = config.excitation.period_ps();
    const double tau_fast = em.tau_fast * kPsPerNs;
    const double tau_slow = em.tau_slow * kPsPerNs;
    const double p_slow = em.slow_path_probability();
    const double p_excite = pulse_excitation_probability(config.excitation);
    const double p_recapture = recapture_probability(config.excitation);
    const double tau_reservoir = config.excitation.recapture_time;
    const bool recapture_on = p_recapture > 0.0 && tau_reservoir > 0.0;

    const DetectionChain chain(config);
    const ComplexPicker picker(em.complexes);
    std::vector<PartitionOutput> parts(n_parts);

    run_partitions(n_parts, resolve_threads(options.threads), [&](std::size_t p) {
        RandomStream rng = numerics::rng_substream(config.rng_seed, p);
        PartitionOutput& out = parts[p];
        out.clicks.resize(chain.detector_count());
        const std::uint64_t begin = static_cast<std::uint64_t>(p) * kPulsesPerPartition;
        const std::uint64_t end = std::min(n_pulses, begin + kPulsesPerPartition);
        double free_at = -std::numeric_limits<double>::infinity();
        for (std::uint64_t n = begin; n < end; ++n) {
            const double t_pulse = static_cast<double>(n) * period;
            if (free_at > t_pulse) {
                ++out.blocked;
                continue;
            }
            if (!rng.bernoulli(p_excite)) continue;
            ++out.excitations;
            // The carrier reservoir created by this pulse survives for an
            // exponential time measured from the pulse arrival.
            const double reservoir_end = recapture_on ? rng.exponential(tau_reservoir) : 0.0;
            double t_excited = 0.0;
            bool reexcited = false;
            double last_emission = 0.0;
            for (;;) {
                const std::size_t ci = picker.pick(rng);
                const bool slow = p_slow > 0.0 && rng.bernoulli(p_slow);
                const double t_emit = t_excited + rng.exponential(slow ? tau_slow : tau_fast);
                if (options.keep_photons) out.photons.push_back({n, t_emit, em.complexes[ci].tag, reexcited});
                chain.propagate(rng, t_pulse + t_emit, ci, out.stages, out.clicks);
                last_emission = t_emit;
                if (!(recapture_on && t_emit < reservoir_end && rng.bernoulli(p_recapture))) break;
                t_excited = t_emit + rng.exponential(tau_reservoir);
                reexcited = true;
            }
            free_at = t_pulse + last_emission;
        }
    });

    PulsedResult result;
    result.pulses = n_pulses;
    std::vector<std::vector<std::int64_t>> merged(chain.detector_count());
    std::size_t n_photons = 0;
    for (const auto& part : parts) n_photons += part.photons.size();
    result.photons.reserve(n_photons);
    for (auto& part : parts) {
        result.stages += part.stages;
        result.excitations += part.excitations;
        result.blocked_pulses += part.blocked;
        result.photons.insert(result.photons.end(), part.photons.begin(), part.photons.end());
        std::vector<PhotonRecord>().swap(part.photons);
        for (std::size_t d = 0; d < merged.size(); ++d) {
            merged[d].insert(merged[d].end(), part.clicks[d].begin(), part.clicks[d].end());
            std::vector<std::int64_t>().swap(part.clicks[d]);
        }
    }
    result.streams = finish_streams(config, std::move(merged), result.stages);
    return result;
}

CwResult simulate_cw(const ExperimentConfig& config, const SimulationOptions& options) {
    if (config.excitation.mode != ExcitationMode::CW) {
        throw SimulationError("simulate_cw: config is not in CW mode");
    }
    if (!(config.duration > 0.0)) throw SimulationError("simulate_cw: duration must be > 0");
    require_valid(config);

    const EmitterSpec& em = config.emitter;
    const double total_ps = config.duration * 1e12;
    const auto n_parts = static_cast<std::size_t>(std::ceil(total_ps / kCwPartitionPs));
    const double rate = cw_excitation_rate(config);
    const double tau_fast = em.tau_fast * kPsPerNs;
    const double tau_slow = em.tau_slow * kPsPerNs;
    const double p_slow = em.slow_path_probability();

    const DetectionChain chain(config);
    const ComplexPicker picker(em.complexes);
    std::vector<PartitionOutput> parts(n_parts);

    run_partitions(n_parts, resolve_threads(options.threads), [&](std::size_t p) {
        PartitionOutput& out = parts[p];
        out.clicks.resize(chain.detector_count());
        if (!(rate > 0.0)) return;
        RandomStream rng = numerics::rng_substream(config.rng_seed, p);
        const double start = static_cast<double>(p) * kCwPartitionPs;
        const double end = std::min(total_ps, start + kCwPartitionPs);
        const double mean_wait = std::isinf(rate) ? 0.0 : 1.0 / rate;
        double free_at = start;
        for (;;) {
            const double t_excited = free_at + rng.exponential(mean_wait);
            if (t_excited >= end) break;
            ++out.excitations;
            const std::size_t ci = picker.pick(rng);
            const bool slow = p_slow > 0.0 && rng.bernoulli(p_slow);
            const double t_emit = t_excited + rng.exponential(slow ? tau_slow : tau_fast);
            chain.propagate(rng, t_emit, ci, out.stages, out.clicks);
            free_at = t_emit;
        }
    });

    CwResult result;
    std::vector<std::vector<std::int64_t>> merged(chain.detector_count());
    for (auto& part : parts) {
        result.stages += part.stages;
        result.excitations += part.excitations;
        for (std::size_t d = 0; d < merged.size(); ++d) {
            merged[d].insert(merged[d].end(), part.clicks[d].begin(), part.clicks[d].end());
            std::vector<std::int64_t>().swap(part.clicks[d]);
        }
    }
    result.streams = finish_streams(config, std::move(merged), result.stages);
    return result;
}

ClickStream merge_background(const ClickStream& stream, double dark_rate, const ExperimentConfig& config) {
    if (!(dark_rate >= 0.0)) throw std::invalid_argument("merge_background: dark_rate must be >= 0");
    if (dark_rate == 0.0) return stream;
    RandomStream rng = numerics::rng_substream(config.rng_seed, kBackgroundStreamBase + stream.detector_id);
    const double span_ps = config.duration * 1e12;
    const std::uint64_t n = rng.poisson(dark_rate * config.duration);
    std::vector<std::uint64_t> dark(n);
    for (auto& t : dark) t = static_cast<std::uint64_t>(std::floor(rng.uniform() * span_ps));
    std::sort(dark.begin(), dark.end());

    std::vector<std::uint64_t> all;
    all.reserve(stream.timestamps.size() + dark.size());
    std::merge(stream.timestamps.begin(), stream.timestamps.end(), dark.begin(), dark.end(), std::back_inserter(all));

    const double dead_ns = stream.detector_id < config.detectors.size() ? config.detectors[stream.detector_id].dead_time : 0.0;
    const auto dead_ps = static_cast<std::uint64_t>(std::llround(dead_ns * kPsPerNs));
    ClickStream out;
    out.detector_id = stream.detector_id;
    out.config_digest = stream.config_digest;
    out.timestamps.reserve(all.size());
    for (std::uint64_t t : all) {
        if (!out.timestamps.empty() && t - out.timestamps.back() < dead_ps) continue;
        out.timestamps.push_back(t);
    }
    return out;
}

}  // namespace photonstat::mc
