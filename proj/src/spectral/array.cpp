#include "photonstat/spectral/array.hpp"

#include "photonstat/numerics/histogram.hpp"
#include "photonstat/numerics/rng.hpp"
#include "photonstat/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace photonstat::spectral {

namespace {

constexpr double kFwhmToSigma = 0.42466090014400953;

double uniform(numerics::RandomStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

DeviceSpectrum make_device(const ArrayStatistics& st, numerics::RandomStream& rng) {
    DeviceSpectrum d;
    const double trion = rng.normal(st.mean_trion_energy, st.std_trion_energy);
    d.two_peak = rng.bernoulli(st.two_peak_probability);
    const double exciton = trion + st.exciton_splitting;
    d.truth.push_back({trion, ComplexTag::Xminus, 1.0});
    d.truth.push_back({exciton, ComplexTag::X, uniform(rng, st.exciton_height_min, st.exciton_height_max)});
    if (rng.bernoulli(st.satellite_probability)) {
        auto h = [&] { return uniform(rng, st.satellite_height_min, st.satellite_height_max); };
        d.truth.push_back({trion - uniform(rng, 3.0, 6.0), ComplexTag::Xminus2, h()});
        d.truth.push_back({exciton + uniform(rng, 2.0, 4.0), ComplexTag::XminusStar, h()});
        d.truth.push_back({exciton + uniform(rng, 5.0, 8.0), ComplexTag::XminusStar, h()});
    }
    if (!d.two_peak) {
        const auto n_extra = 1 + rng.below(3);
        for (std::uint64_t k = 0; k < n_extra; ++k) {
            // Keep lines at least 1 meV apart so each stays a separate peak.
            for (int attempt = 0; attempt < 100; ++attempt) {
                const double e = trion + uniform(rng, -12.0, 14.0);
                auto clear = [e](const PeakAnnotation& p) { return std::abs(p.energy - e) >= 1.0; };
                if (std::all_of(d.truth.begin(), d.truth.end(), clear) && std::all_of(d.extra.begin(), d.extra.end(), clear)) {
                    d.extra.push_back({e, ComplexTag::X, uniform(rng, st.extra_height_min, st.extra_height_max)});
                    break;
                }
            }
        }
    }

    const double sigma = st.instrument_fwhm * kFwhmToSigma;
    const double lam_lo = energy_mev_to_nm(trion + st.window);
    const double lam_hi = energy_mev_to_nm(trion - st.window);
    const auto n_bins = static_cast<std::size_t>(std::floor((lam_hi - lam_lo) / st.wavelength_step)) + 1;
    d.wavelength.resize(n_bins);
    d.counts.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        const double lam = lam_lo + static_cast<double>(i) * st.wavelength_step;
        const double e = nm_to_energy_mev(lam);
        double mu = st.background_counts;
        auto add = [&](const PeakAnnotation& p) {
            const double z = (e - p.energy) / sigma;
            if (std::abs(z) < 40.0) mu += p.height * st.peak_counts * std::exp(-0.5 * z * z);
        };
        for (const auto& p : d.truth) add(p);
        for (const auto& p : d.extra) add(p);
        d.wavelength[i] = lam;
        d.counts[i] = static_cast<double>(rng.poisson(mu));
    }
    return d;
}

}  // namespace

ArraySpectrumSet generate_array(std::size_t n_devices, const ArrayStatistics& stats, std::uint64_t seed) {
    if (n_devices == 0) throw std::invalid_argument("generate_array: n_devices must be >= 1");
    if (!(stats.std_trion_energy >= 0.0) || !(stats.instrument_fwhm > 0.0) || !(stats.wavelength_step > 0.0) ||
        !(stats.two_peak_probability >= 0.0 && stats.two_peak_probability <= 1.0)) {
        throw std::invalid_argument("generate_array: invalid statistics");
    }
    ArraySpectrumSet set;
    set.devices.reserve(n_devices);
    for (std::size_t i = 0; i < n_devices; ++i) {
        numerics::RandomStream rng = numerics::rng_substream(seed, i);
        set.devices.push_back(make_device(stats, rng));
    }
    return set;
}

Classification classify_spectrum(const std::vector<double>& wavelength, const std::vector<double>& counts,
                                 double dominance_threshold) {
    if (wavelength.empty() || wavelength.size() != counts.size()) {
        throw std::invalid_argument("classify_spectrum: empty spectrum or size mismatch");
    }
    const std::size_t n = counts.size();
    const double base = median(counts);
    const double floor = base + 6.0 * std::sqrt(base + 1.0);
    const std::size_t r = 5;

    Classification c;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = counts[i];
        if (!(v > floor)) continue;
        bool is_max = true;
        for (std::size_t j = i > r ? i - r : 0; j <= std::min(n - 1, i + r) && is_max; ++j) {
            if (j < i ? counts[j] >= v : (j > i && counts[j] > v)) is_max = false;
        }
        if (!is_max) continue;
        // Prominence against the deepest point before a higher sample (or
        // the edge) on each side; noise bumps on a line's flank fail this.
        double left_min = v, right_min = v;
        for (std::size_t j = i; j-- > 0 && counts[j] <= v;) left_min = std::min(left_min, counts[j]);
        for (std::size_t j = i + 1; j < n && counts[j] <= v; ++j) right_min = std::min(right_min, counts[j]);
        if (v - std::max(left_min, right_min) < 5.0 * std::sqrt(v + 1.0)) continue;

        DetectedPeak p;
        double offset = 0.0, top = v;
        if (i > 0 && i + 1 < n) {
            const double ym = counts[i - 1], yp = counts[i + 1];
            const double den = ym - 2.0 * v + yp;
            if (den < 0.0) {
                offset = 0.5 * (ym - yp) / den;
                top = v - 0.25 * (ym - yp) * offset;
            }
        }
        const double step = i + 1 < n ? wavelength[i + 1] - wavelength[i] : wavelength[i] - wavelength[i - 1];
        p.wavelength = wavelength[i] + offset * step;
        p.energy = nm_to_energy_mev(p.wavelength);
        p.height = top - base;
        c.peaks.push_back(p);
    }
    std::sort(c.peaks.begin(), c.peaks.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
    if (c.peaks.empty()) return c;

    double tallest = 0.0;
    for (const auto& p : c.peaks) tallest = std::max(tallest, p.height);
    std::vector<std::size_t> dominant;
    for (std::size_t k = 0; k < c.peaks.size(); ++k) {
        if (c.peaks[k].height > dominance_threshold * tallest) dominant.push_back(k);
    }
    c.two_dominant = dominant.size() == 2;
    c.multi_peak = dominant.size() > 2;
    if (c.two_dominant) {
        DetectedPeak& trion = c.peaks[dominant[0]];
        DetectedPeak& exciton = c.peaks[dominant[1]];
        trion.tag = ComplexTag::Xminus;
        exciton.tag = ComplexTag::X;
        c.trion_energy = trion.energy;
        for (auto& p : c.peaks) {
            if (p.tag) continue;
            if (p.energy < trion.energy) p.tag = ComplexTag::Xminus2;
            else if (p.energy > exciton.energy) p.tag = ComplexTag::XminusStar;
        }
    }
    return c;
}

YieldReport yield_report(const ArraySpectrumSet& set, double dominance_threshold) {
    YieldReport y;
    y.n_devices = set.devices.size();
    std::vector<double> energies;
    for (const auto& d : set.devices) {
        Classification c = classify_spectrum(d.wavelength, d.counts, dominance_threshold);
        if (c.no_emitter()) ++y.n_no_emitter;
        if (c.two_dominant) {
            ++y.n_two_peak;
            energies.push_back(*c.trion_energy);
        }
        y.classifications.push_back(std::move(c));
    }
    const numerics::MeanStd ms = numerics::mean_std(energies);
    y.mean_trion_energy = ms.mean;
    y.std_trion_energy = ms.std;
    return y;
}

std::string spectrum_csv(const DeviceSpectrum& d) {
    std::string out = "wavelength_nm,counts\n";
    for (std::size_t i = 0; i < d.wavelength.size(); ++i) {
        out += format_double(d.wavelength[i]);
        out += ',';
        out += format_double(d.counts[i]);
        out += '\n';
    }
    return out;
}

DeviceSpectrum parse_spectrum_csv(std::string_view text) {
    DeviceSpectrum d;
    std::size_t start = 0, line_no = 0;
    bool header = false;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            header = true;
            if (line != "wavelength_nm,counts") throw std::invalid_argument("spectrum csv: expected header 'wavelength_nm,counts'");
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw std::invalid_argument("spectrum csv line " + std::to_string(line_no) + ": expected two fields");
        }
        double v[2];
        const std::string_view f[2] = {line.substr(0, comma), line.substr(comma + 1)};
        for (int k = 0; k < 2; ++k) {
            const auto r = std::from_chars(f[k].data(), f[k].data() + f[k].size(), v[k]);
            if (r.ec != std::errc() || r.ptr != f[k].data() + f[k].size()) {
                throw std::invalid_argument("spectrum csv line " + std::to_string(line_no) + ": cannot parse number");
            }
        }
        d.wavelength.push_back(v[0]);
        d.counts.push_back(v[1]);
    }
    return d;
}

}  // namespace photonstat::spectral
