// photonstat command-line front end.
//
// Exit codes: 0 success, 1 analysis or criterion failure, 2 input error.
// Every file is written inside --out, atomically, and listed in
// manifest.json next to the outputs.

#include "photonstat/acceptance/criteria.hpp"
#include "photonstat/errors.hpp"
#include "photonstat/mc/engine.hpp"
#include "photonstat/mc/stream_io.hpp"
#include "photonstat/model_json.hpp"
#include "photonstat/numerics/least_squares.hpp"
#include "photonstat/numerics/rng.hpp"
#include "photonstat/photometry/photometry.hpp"
#include "photonstat/report.hpp"
#include "photonstat/results_json.hpp"
#include "photonstat/spectral/array.hpp"
#include "photonstat/spectral/lineshape.hpp"
#include "photonstat/tcspc/correlation.hpp"
#include "photonstat/tcspc/decay.hpp"
#include "photonstat/tcspc/purity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace photonstat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An analysis gave up on valid input; the error report is already written.
struct AnalysisFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Collects outputs for the manifest and refuses names that would escape the
// output directory.
class OutputDir {
public:
    explicit OutputDir(fs::path root) : root_(std::move(root)) {}

    void write(const std::string& name, std::string_view contents) {
        const fs::path rel(name);
        if (rel.empty() || rel.has_parent_path() || rel.is_absolute() || name == "." || name == "..") {
            throw std::logic_error("output name '" + name + "' is not a plain file name");
        }
        fs::create_directories(root_);
        write_file_atomic(root_ / rel, contents);
        outputs_.push_back({{"path", name}, {"sha256", sha256_hex(contents)}, {"bytes", contents.size()}});
    }

    const fs::path& root() const { return root_; }
    const json& outputs() const { return outputs_; }

private:
    fs::path root_;
    json outputs_ = json::array();
};

struct RunContext {
    std::string command_line;
    std::string command;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    json inputs = json::array();
    std::vector<std::string> overrides;
    std::optional<std::string> config_digest;
    std::optional<std::uint64_t> seed;

    void add_input(const fs::path& p) { inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}}); }
};

void write_manifest(OutputDir& out, const RunContext& ctx, const json& summary = json::object()) {
    json m = {{"schema", "photonstat-manifest/1"},
              {"tool_version", std::string(kToolVersion)},
              {"command", ctx.command},
              {"command_line", ctx.command_line},
              {"config_digest", ctx.config_digest ? json(*ctx.config_digest) : json(nullptr)},
              {"rng", {{"algorithm", std::string(numerics::kRngAlgorithm)},
                       {"seed", ctx.seed ? json(*ctx.seed) : json(nullptr)}}},
              {"overrides", ctx.overrides},
              {"inputs", ctx.inputs},
              {"outputs", out.outputs()},
              {"summary", summary},
              {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count()}};
    out.write("manifest.json", dump_json(m));
}

void require_file(const fs::path& p) {
    if (!fs::is_regular_file(p)) throw InputError("input file not found: " + p.string());
}

std::string read_text(const fs::path& p) {
    require_file(p);
    return mc::read_file(p);
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides, RunContext& ctx) {
    json doc;
    if (path.empty()) {
        doc = to_json(nominal_device());
    } else {
        doc = parse_json_text(read_text(path));
        ctx.add_input(path);
    }
    for (const auto& o : overrides) apply_override(doc, o);
    ctx.overrides = overrides;
    ExperimentConfig c = config_from_json(doc);
    const auto violations = validate(c);
    if (!violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.rule;
        throw InputError(msg);
    }
    ctx.config_digest = config_digest(c);
    ctx.seed = c.rng_seed;
    return c;
}

mc::ClickStream load_stream(const fs::path& p, RunContext& ctx) {
    require_file(p);
    ctx.add_input(p);
    return mc::read_click_stream(p);
}

// Writes either the result report or, when `body` throws an analysis error,
// an error report under the same name; the latter becomes exit code 1.
void run_analysis(OutputDir& out, RunContext& ctx, const std::string& kind, const ReportProvenance& prov,
                  const std::function<json()>& body) {
    const std::string name = kind + "_report.json";
    auto fail = [&](const std::string& type, const std::string& what) {
        out.write(name, dump_json(make_error_report(kind, type, what, prov)));
        write_manifest(out, ctx, {{"status", "error"}, {"error_type", type}});
        throw AnalysisFailed(kind + ": " + what);
    };
    json result;
    try {
        result = body();
    } catch (const AnalysisError& e) {
        fail(e.kind(), e.what());
    } catch (const numerics::FitError& e) {
        fail("fit_failed", e.what());
    }
    out.write(name, dump_json(make_report(kind, result, prov)));
    write_manifest(out, ctx, {{"status", "ok"}});
}

std::string join_digests(const RunContext& ctx) {
    std::string all;
    for (const auto& in : ctx.inputs) all += in.at("sha256").get<std::string>();
    return ctx.inputs.size() == 1 ? ctx.inputs[0].at("sha256").get<std::string>() : sha256_hex(all);
}

std::string csv_row(std::initializer_list<double> values) {
    std::string row;
    for (double v : values) row += (row.empty() ? "" : ",") + format_double(v);
    return row + "\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::vector<std::string> set;
    std::string out;
    std::optional<double> pulses;
    double dark_rate = 0.0;
    std::string format = "binary";
    bool no_photons = false;
    unsigned threads = 0;
};

int cmd_simulate(const SimulateArgs& a, RunContext& ctx) {
    ExperimentConfig c = load_config(a.config, a.set, ctx);
    if (a.pulses) {
        if (c.excitation.mode != ExcitationMode::Pulsed) throw InputError("--pulses needs a pulsed config");
        if (!(*a.pulses > 0.0)) throw InputError("--pulses must be > 0");
        c.duration = *a.pulses / c.excitation.rep_rate;
        ctx.config_digest = config_digest(c);
    }
    OutputDir out(a.out);
    out.write("config.json", dump_json(to_json(c)));

    mc::SimulationOptions opt;
    opt.keep_photons = !a.no_photons && c.excitation.mode == ExcitationMode::Pulsed;
    opt.threads = a.threads;
    std::vector<mc::ClickStream> streams;
    json summary;
    if (c.excitation.mode == ExcitationMode::Pulsed) {
        mc::PulsedResult r = mc::simulate_pulsed(c, opt);
        if (opt.keep_photons) out.write("photons.csv", mc::photons_csv(r.photons));
        streams = std::move(r.streams);
        summary = {{"pulses", r.pulses},
                   {"excitations", r.excitations},
                   {"blocked_pulses", r.blocked_pulses},
                   {"stages", to_json(r.stages)}};
    } else {
        mc::CwResult r = mc::simulate_cw(c, opt);
        streams = std::move(r.streams);
        summary = {{"excitations", r.excitations}, {"stages", to_json(r.stages)}};
    }
    json clicks = json::array();
    for (auto& s : streams) {
        if (a.dark_rate > 0.0) s = mc::merge_background(s, a.dark_rate, c);
        const std::string stem = "detector_" + std::to_string(s.detector_id);
        if (a.format == "csv") {
            out.write(stem + ".csv", mc::click_stream_csv(s));
        } else {
            out.write(stem + ".pstm", mc::encode_click_stream(s));
        }
        clicks.push_back(s.timestamps.size());
    }
    summary["clicks_per_detector"] = clicks;
    summary["dark_rate_cps"] = a.dark_rate;
    write_manifest(out, ctx, summary);
    std::cout << "wrote " << streams.size() << " stream(s) to " << out.root().string() << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- analyze

struct LifetimeArgs {
    std::string stream, config, out;
    std::optional<double> period, window, fit_start, fit_end;
    double bin = 100.0;
    bool background = false;
    std::uint64_t min_counts = 1000;
};

double period_from(const std::optional<double>& period, const std::string& config, RunContext& ctx) {
    if (period) {
        if (!(*period > 0.0)) throw InputError("--period must be > 0");
        return *period;
    }
    if (!config.empty()) {
        const ExperimentConfig c = load_config(config, {}, ctx);
        if (c.excitation.mode != ExcitationMode::Pulsed) throw InputError("config is not pulsed; give --period");
        return c.excitation.period_ps();
    }
    throw InputError("give --period or --config");
}

int cmd_lifetime(const LifetimeArgs& a, RunContext& ctx) {
    const mc::ClickStream s = load_stream(a.stream, ctx);
    const double period = period_from(a.period, a.config, ctx);
    OutputDir out(a.out);
    const ReportProvenance prov{join_digests(ctx), ctx.seed};
    run_analysis(out, ctx, "lifetime", prov, [&] {
        const tcspc::DecayHistogram h = tcspc::build_decay_histogram(s, period, a.bin, a.window.value_or(period));
        tcspc::DecayFitOptions o;
        if (a.fit_start) o.fit_start = *a.fit_start;
        if (a.fit_end) o.fit_end = *a.fit_end;
        o.fit_background = a.background;
        o.min_counts = a.min_counts;
        std::string csv = "time_ps,counts\n";
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            csv += csv_row({h.bin_center(i), static_cast<double>(h.counts[i])});
        }
        out.write("decay_histogram.csv", csv);
        const tcspc::DecayFit f = tcspc::fit_biexponential(h, o);
        std::string fit = "time_ps,counts,fit\n";
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            const double t = h.bin_center(i);
            if (t < f.fit_start || t >= f.fit_end) continue;
            const double tn = t * 1e-3;
            double model = f.amplitude_fast * std::exp(-tn / f.tau_fast) + f.background;
            if (!f.single_component) model += f.amplitude_slow * std::exp(-tn / f.tau_slow);
            fit += csv_row({t, static_cast<double>(h.counts[i]), model});
        }
        out.write("decay_fit.csv", fit);
        json r = to_json(f);
        r["period_ps"] = period;
        r["bin_width_ps"] = a.bin;
        r["total_counts"] = h.total();
        std::cout << "tau_fast " << format_double(f.tau_fast) << " ns, tau_slow " << format_double(f.tau_slow)
                  << " ns" << (f.single_component ? " (single component)" : "") << "\n";
        return r;
    });
    return kExitOk;
}

struct G2Args {
    std::string a, b, config, out;
    std::optional<double> period, window, jitter;
    std::int64_t bin = 20;
    int side_peaks = 10;
    unsigned threads = 0;
};

int cmd_g2(const G2Args& a, RunContext& ctx) {
    const mc::ClickStream sa = load_stream(a.a, ctx);
    const mc::ClickStream sb = load_stream(a.b, ctx);
    std::optional<double> period = a.period;
    std::optional<double> jitter = a.jitter;
    if (!period && !a.config.empty()) {
        const ExperimentConfig c = load_config(a.config, {}, ctx);
        if (c.excitation.mode == ExcitationMode::Pulsed) period = c.excitation.period_ps();
        if (!jitter && !c.detectors.empty()) jitter = c.detectors[0].jitter_fwhm;
    }
    if (period && !(*period > 0.0)) throw InputError("--period must be > 0");
    if (a.bin <= 0) throw InputError("--bin must be > 0");
    if (a.side_peaks < 1) throw InputError("--side-peaks must be >= 1");
    std::int64_t window = 0;
    if (a.window) {
        window = static_cast<std::int64_t>(std::llround(*a.window));
    } else if (period) {
        window = static_cast<std::int64_t>(std::llround((a.side_peaks + 1) * *period));
    } else {
        throw InputError("give --window or --period");
    }
    OutputDir out(a.out);
    const ReportProvenance prov{join_digests(ctx), ctx.seed};
    run_analysis(out, ctx, "g2", prov, [&] {
        const tcspc::CorrelationHistogram h = tcspc::correlate(sa, sb, a.bin, window, period, a.threads);
        out.write("g2_histogram.csv", tcspc::correlation_csv(h));
        // Without a period the histogram is CW data: normalise against the
        // window itself.
        const std::optional<double> norm = period ? period : std::optional<double>(static_cast<double>(window) / (a.side_peaks + 1));
        tcspc::G2Analysis g;
        if (period) {
            g = tcspc::analyze_g2(h, a.side_peaks, jitter);
        } else {
            g.purity = tcspc::purity_from_histogram(h, a.side_peaks, norm);
        }
        json r = to_json(g.purity);
        r["dip_fit"] = g.dip ? to_json(*g.dip) : json(nullptr);
        r["bin_width_ps"] = a.bin;
        r["window_ps"] = window;
        r["coincidences"] = h.total();
        std::cout << "g2(0) " << format_double(g.purity.g2_zero) << " +- " << format_double(g.purity.uncertainty)
                  << ", purity " << format_double(g.purity.purity) << "\n";
        return r;
    });
    return kExitOk;
}

int cmd_saturation(const std::string& input, const std::string& out_dir, RunContext& ctx) {
    const std::string text = read_text(input);
    ctx.add_input(input);
    const auto points = photometry::parse_saturation_csv(text);
    OutputDir out(out_dir);
    run_analysis(out, ctx, "saturation", {join_digests(ctx), std::nullopt}, [&] {
        const photometry::SaturationCurve c = photometry::fit_saturation(points);
        std::string csv = "power,rate,fit\n";
        for (const auto& p : c.points) csv += csv_row({p.power, p.rate, c.evaluate(p.power)});
        out.write("saturation_curve.csv", csv);
        std::cout << "rate_sat " << format_double(c.rate_sat) << " cps, p_sat " << format_double(c.p_sat) << "\n";
        return to_json(c);
    });
    return kExitOk;
}

int cmd_linewidth(const std::string& input, double etalon, std::optional<double> lifetime, const std::string& out_dir,
                  RunContext& ctx) {
    const std::string text = read_text(input);
    ctx.add_input(input);
    const spectral::LineProfile profile = spectral::parse_profile_csv(text);
    OutputDir out(out_dir);
    run_analysis(out, ctx, "linewidth", {join_digests(ctx), std::nullopt}, [&] {
        spectral::LinewidthReport r = spectral::fit_lineshape(profile, etalon);
        if (lifetime) spectral::coherence_metrics(r, *lifetime);
        std::string csv = "detuning_ghz,counts,fit\n";
        for (std::size_t i = 0; i < profile.detunings.size(); ++i) {
            const double d = profile.detunings[i];
            csv += csv_row({d, profile.intensities[i], spectral::evaluate_fit(r, d)});
        }
        out.write("linewidth_fit.csv", csv);
        std::cout << "model " << spectral::to_string(r.model) << ", deconvolved FWHM "
                  << format_double(r.deconvolved_fwhm) << " GHz\n";
        return to_json(r);
    });
    return kExitOk;
}

int cmd_yield(const std::vector<std::string>& inputs, double threshold, const std::string& out_dir, RunContext& ctx) {
    if (inputs.empty()) throw InputError("no spectra given");
    spectral::ArraySpectrumSet set;
    for (const auto& p : inputs) {
        const std::string text = read_text(p);
        ctx.add_input(p);
        set.devices.push_back(spectral::parse_spectrum_csv(text));
    }
    OutputDir out(out_dir);
    run_analysis(out, ctx, "yield", {join_digests(ctx), std::nullopt}, [&] {
        const spectral::YieldReport y = spectral::yield_report(set, threshold);
        std::string csv = "file,two_dominant,multi_peak,n_peaks,trion_energy_mev\n";
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const auto& c = y.classifications[i];
            csv += fs::path(inputs[i]).filename().string() + "," + (c.two_dominant ? "1" : "0") + "," +
                   (c.multi_peak ? "1" : "0") + "," + std::to_string(c.peaks.size()) + "," +
                   (c.trion_energy ? format_double(*c.trion_energy) : std::string()) + "\n";
        }
        out.write("yield_devices.csv", csv);
        std::cout << y.n_two_peak << " of " << y.n_devices << " devices two-peak, mean "
                  << format_double(y.mean_trion_energy) << " meV\n";
        json r = to_json(y);
        r["dominance_threshold"] = threshold;
        return r;
    });
    return kExitOk;
}

struct EfficiencyArgs {
    double rate = 0.0;
    std::optional<double> rate_all;
    double rep_rate = 80e6, eta_t = 0.078, eta_d = 0.15, directionality = 0.5, sideband = 0.8;
    std::string out;
};

int cmd_efficiency(const EfficiencyArgs& a, RunContext& ctx) {
    photometry::EfficiencyReport e;
    try {
        e = photometry::efficiency_report(a.rate, a.rate_all.value_or(a.rate), a.rep_rate, a.eta_t, a.eta_d,
                                          a.directionality, a.sideband);
    } catch (const std::invalid_argument& ex) {
        throw InputError(ex.what());
    }
    OutputDir out(a.out);
    run_analysis(out, ctx, "efficiency", {sha256_hex(ctx.command_line), std::nullopt}, [&] {
        std::cout << "source efficiency " << format_double(e.source.value) << ", collection efficiency "
                  << format_double(e.collection.value) << "\n";
        return to_json(e);
    });
    return kExitOk;
}

// ---------------------------------------------------------------- generate

int cmd_scan(const spectral::TrueLine& line, double etalon, double step, double counts, std::uint64_t seed,
             const std::string& out_dir, RunContext& ctx) {
    spectral::LineProfile p;
    try {
        p = spectral::scan_etalon(line, etalon, step, counts, seed);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    ctx.seed = seed;
    OutputDir out(out_dir);
    out.write("scan.csv", spectral::profile_csv(p));
    write_manifest(out, ctx, {{"lorentzian_fwhm_ghz", line.lorentzian_fwhm},
                              {"gaussian_fwhm_ghz", line.gaussian_fwhm},
                              {"center_ghz", line.center},
                              {"etalon_fwhm_ghz", etalon},
                              {"points", p.detunings.size()}});
    return kExitOk;
}

int cmd_array(std::size_t n, const spectral::ArrayStatistics& st, std::uint64_t seed, const std::string& out_dir,
              RunContext& ctx) {
    const spectral::ArraySpectrumSet set = spectral::generate_array(n, st, seed);
    ctx.seed = seed;
    OutputDir out(out_dir);
    json truth = json::array();
    char name[32];
    for (std::size_t i = 0; i < set.devices.size(); ++i) {
        const auto& d = set.devices[i];
        std::snprintf(name, sizeof name, "device_%03zu.csv", i);
        out.write(name, spectral::spectrum_csv(d));
        json lines = json::array();
        for (const auto& t : d.truth) {
            lines.push_back({{"energy_mev", t.energy}, {"tag", std::string(to_string(t.tag))}, {"height", t.height}});
        }
        json extra = json::array();
        for (const auto& t : d.extra) extra.push_back({{"energy_mev", t.energy}, {"height", t.height}});
        truth.push_back({{"file", name}, {"two_peak", d.two_peak}, {"lines", lines}, {"extra_lines", extra}});
    }
    out.write("array_truth.json", dump_json(truth));
    write_manifest(out, ctx, {{"devices", n},
                              {"mean_trion_energy_mev", st.mean_trion_energy},
                              {"std_trion_energy_mev", st.std_trion_energy},
                              {"two_peak_probability", st.two_peak_probability}});
    return kExitOk;
}

// --------------------------------------------------------------- reproduce

int cmd_reproduce(bool list, const std::vector<std::string>& only, double scale, unsigned threads,
                  const std::string& out_dir, RunContext& ctx) {
    const auto& all = acceptance::criteria();
    if (list) {
        for (const auto& c : all) std::cout << c.id << "  " << c.title << "\n";
        return kExitOk;
    }
    if (out_dir.empty()) throw InputError("--out is required unless --list is given");
    if (!(scale > 0.0)) throw InputError("--tolerance-scale must be > 0");
    std::vector<std::string> ids = only;
    if (ids.empty()) {
        for (const auto& c : all) ids.push_back(c.id);
    }
    for (const auto& id : ids) {
        if (std::none_of(all.begin(), all.end(), [&](const auto& c) { return c.id == id; })) {
            throw InputError("unknown criterion '" + id + "'");
        }
    }
    acceptance::Options opt;
    opt.tolerance_scale = scale;
    opt.threads = threads;
    std::vector<acceptance::CriterionResult> results;
    std::string table;
    for (const auto& id : ids) {
        results.push_back(acceptance::run_criterion(id, opt));
        const std::string line = results.back().line();
        std::cout << line << std::endl;
        table += line + "\n";
    }
    const bool ok = acceptance::all_passed(results);
    table += ok ? "ALL PASS\n" : "FAILURES\n";
    OutputDir out(out_dir);
    out.write("acceptance.json", dump_json(acceptance::results_json(results, opt)));
    out.write("acceptance.txt", table);
    write_manifest(out, ctx, {{"all_passed", ok}, {"tolerance_scale", scale}});
    std::cout << (ok ? "ALL PASS" : "FAILURES") << "\n";
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon source simulator and analysis toolkit"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    RunContext ctx;
    for (int i = 0; i < argc; ++i) ctx.command_line += (i ? " " : "") + std::string(argv[i]);
    std::function<int()> action;

    // simulate
    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo engine and write click streams");
    simulate->add_option("--config", sim.config, "Experiment config (JSON); nominal device when omitted");
    simulate->add_option("--set", sim.set, "Dotted-path override, e.g. emitter.tau_fast=1.7 (repeatable)");
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_option("--pulses", sim.pulses, "Set the duration to this many pulses");
    simulate->add_option("--dark-rate", sim.dark_rate, "Merge uncorrelated background clicks (cps)");
    simulate->add_option("--format", sim.format, "Stream format")->check(CLI::IsMember({"binary", "csv"}));
    simulate->add_flag("--no-photons", sim.no_photons, "Skip photons.csv");
    simulate->add_option("--threads", sim.threads, "Worker threads (0: all cores)");
    simulate->callback([&] {
        ctx.command = "simulate";
        action = [&] { return cmd_simulate(sim, ctx); };
    });

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Analyse measured or simulated data");
    analyze->require_subcommand(1);

    LifetimeArgs lt;
    auto* lifetime = analyze->add_subcommand("lifetime", "Bi-exponential decay fit of a click stream");
    lifetime->add_option("--stream", lt.stream, "Click stream (.pstm or CSV)")->required();
    lifetime->add_option("--period", lt.period, "Laser period (ps)");
    lifetime->add_option("--config", lt.config, "Take the period from this config");
    lifetime->add_option("--bin", lt.bin, "Bin width (ps)");
    lifetime->add_option("--window", lt.window, "Histogram window (ps); the period by default");
    lifetime->add_option("--fit-start", lt.fit_start, "Fit start (ps); the peak bin by default");
    lifetime->add_option("--fit-end", lt.fit_end, "Fit end (ps)");
    lifetime->add_flag("--background", lt.background, "Fit a flat background");
    lifetime->add_option("--min-counts", lt.min_counts, "Count floor inside the fit range");
    lifetime->add_option("--out", lt.out, "Output directory")->required();
    lifetime->callback([&] {
        ctx.command = "analyze lifetime";
        action = [&] { return cmd_lifetime(lt, ctx); };
    });

    G2Args g2;
    auto* g2cmd = analyze->add_subcommand("g2", "HBT coincidence histogram, purity and dip fit");
    g2cmd->add_option("--a", g2.a, "Start-channel stream")->required();
    g2cmd->add_option("--b", g2.b, "Stop-channel stream")->required();
    g2cmd->add_option("--period", g2.period, "Laser period (ps); omit for CW data");
    g2cmd->add_option("--config", g2.config, "Take period and jitter from this config");
    g2cmd->add_option("--bin", g2.bin, "Bin width (ps)");
    g2cmd->add_option("--window", g2.window, "Half window (ps); (side-peaks + 1) periods by default");
    g2cmd->add_option("--side-peaks", g2.side_peaks, "Side peaks per side used for normalisation");
    g2cmd->add_option("--jitter", g2.jitter, "Detector jitter FWHM (ps); enables the dip fit");
    g2cmd->add_option("--threads", g2.threads, "Worker threads (0: all cores)");
    g2cmd->add_option("--out", g2.out, "Output directory")->required();
    g2cmd->callback([&] {
        ctx.command = "analyze g2";
        action = [&] { return cmd_g2(g2, ctx); };
    });

    std::string sat_in, sat_out;
    auto* saturation = analyze->add_subcommand("saturation", "Fit R(P) = R_sat (1 - exp(-P / P_sat))");
    saturation->add_option("--input", sat_in, "CSV with header power,rate")->required();
    saturation->add_option("--out", sat_out, "Output directory")->required();
    saturation->callback([&] {
        ctx.command = "analyze saturation";
        action = [&] { return cmd_saturation(sat_in, sat_out, ctx); };
    });

    std::string lw_in, lw_out;
    double lw_etalon = 1.3;
    std::optional<double> lw_lifetime;
    auto* linewidth = analyze->add_subcommand("linewidth", "Lorentzian / Voigt fit of an etalon scan");
    linewidth->add_option("--input", lw_in, "CSV with header detuning_ghz,counts")->required();
    linewidth->add_option("--etalon", lw_etalon, "Etalon FWHM (GHz)");
    linewidth->add_option("--lifetime", lw_lifetime, "Radiative lifetime (ns) for coherence metrics");
    linewidth->add_option("--out", lw_out, "Output directory")->required();
    linewidth->callback([&] {
        ctx.command = "analyze linewidth";
        action = [&] { return cmd_linewidth(lw_in, lw_etalon, lw_lifetime, lw_out, ctx); };
    });

    std::vector<std::string> y_in;
    std::string y_out;
    double y_threshold = 0.25;
    auto* yield = analyze->add_subcommand("yield", "Classify array spectra and report the two-peak yield");
    yield->add_option("spectra", y_in, "Spectrum CSVs (wavelength_nm,counts)")->required();
    yield->add_option("--threshold", y_threshold, "Dominance threshold relative to the tallest peak");
    yield->add_option("--out", y_out, "Output directory")->required();
    yield->callback([&] {
        ctx.command = "analyze yield";
        action = [&] { return cmd_yield(y_in, y_threshold, y_out, ctx); };
    });

    EfficiencyArgs ef;
    auto* efficiency = analyze->add_subcommand("efficiency", "Source and collection efficiency from count rates");
    efficiency->add_option("--rate", ef.rate, "Detected rate on the selected line (cps)")->required();
    efficiency->add_option("--rate-all", ef.rate_all, "Detected rate over all lines (cps)");
    efficiency->add_option("--rep-rate", ef.rep_rate, "Repetition rate (Hz)");
    efficiency->add_option("--eta-t", ef.eta_t, "Setup transmission");
    efficiency->add_option("--eta-d", ef.eta_d, "Detector efficiency");
    efficiency->add_option("--directionality", ef.directionality, "Fraction emitted towards the tip");
    efficiency->add_option("--sideband", ef.sideband, "Zero-phonon fraction kept by the filter");
    efficiency->add_option("--out", ef.out, "Output directory")->required();
    efficiency->callback([&] {
        ctx.command = "analyze efficiency";
        action = [&] { return cmd_efficiency(ef, ctx); };
    });

    // generate
    auto* generate = app.add_subcommand("generate", "Synthetic spectra");
    generate->require_subcommand(1);

    spectral::TrueLine line{0.77, 0.0, 0.0};
    double sc_etalon = 1.3, sc_step = 0.1, sc_counts = 1e4;
    std::uint64_t sc_seed = 1;
    std::string sc_out;
    auto* scan = generate->add_subcommand("scan", "Etalon scan of a Voigt line");
    scan->add_option("--lorentzian", line.lorentzian_fwhm, "Homogeneous FWHM (GHz)");
    scan->add_option("--gaussian", line.gaussian_fwhm, "Inhomogeneous FWHM (GHz)");
    scan->add_option("--center", line.center, "Line detuning (GHz)");
    scan->add_option("--etalon", sc_etalon, "Etalon FWHM (GHz)");
    scan->add_option("--step", sc_step, "Scan step (GHz)");
    scan->add_option("--counts", sc_counts, "Expected counts at the peak");
    scan->add_option("--seed", sc_seed, "RNG seed");
    scan->add_option("--out", sc_out, "Output directory")->required();
    scan->callback([&] {
        ctx.command = "generate scan";
        action = [&] { return cmd_scan(line, sc_etalon, sc_step, sc_counts, sc_seed, sc_out, ctx); };
    });

    spectral::ArrayStatistics st;
    std::size_t ar_n = 100;
    std::uint64_t ar_seed = 1;
    std::string ar_out;
    auto* array = generate->add_subcommand("array", "Photoluminescence spectra of a nanowire array");
    array->add_option("--devices", ar_n, "Number of devices");
    array->add_option("--mean", st.mean_trion_energy, "Mean trion energy (meV)");
    array->add_option("--std", st.std_trion_energy, "Trion energy spread (meV)");
    array->add_option("--two-peak-prob", st.two_peak_probability, "Two-peak probability");
    array->add_option("--seed", ar_seed, "RNG seed");
    array->add_option("--out", ar_out, "Output directory")->required();
    array->callback([&] {
        ctx.command = "generate array";
        action = [&] { return cmd_array(ar_n, st, ar_seed, ar_out, ctx); };
    });

    // reproduce
    bool rp_list = false;
    std::vector<std::string> rp_only;
    double rp_scale = 1.0;
    unsigned rp_threads = 0;
    std::string rp_out;
    auto* reproduce = app.add_subcommand("reproduce", "Run the acceptance suite and write a report bundle");
    reproduce->add_flag("--list", rp_list, "List criterion IDs and exit");
    reproduce->add_option("--only", rp_only, "Run only these criteria (repeatable)");
    reproduce->add_option("--tolerance-scale", rp_scale, "Multiply every tolerance band");
    reproduce->add_option("--threads", rp_threads, "Worker threads (0: all cores)");
    reproduce->add_option("--out", rp_out, "Output directory");
    reproduce->callback([&] {
        ctx.command = "reproduce";
        action = [&] { return cmd_reproduce(rp_list, rp_only, rp_scale, rp_threads, rp_out, ctx); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        return action();
    } catch (const AnalysisFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const mc::StreamFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const mc::SimulationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
