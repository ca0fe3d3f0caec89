#include "photonstat/model_json.hpp"

#include "photonstat/report.hpp"

#include <algorithm>
#include <initializer_list>
#include <set>

namespace photonstat {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, _] : obj.items()) {
        if (!keys.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
    }
    for (const char* k : allowed) {
        if (!obj.contains(k)) throw ConfigError(path.empty() ? k : path + "." + k, "missing required key");
    }
}

double number(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

json emitter_json(const EmitterSpec& e) {
    json complexes = json::array();
    for (const ChargeComplex& c : e.complexes) {
        complexes.push_back({{"tag", std::string(to_string(c.tag))},
                             {"emission_energy", c.emission_energy},
                             {"relative_intensity", c.relative_intensity}});
    }
    return {{"tau_fast", e.tau_fast},
            {"tau_slow", e.tau_slow},
            {"slow_branch_fraction", e.slow_branch_fraction},
            {"dark_fraction", e.dark_fraction},
            {"complexes", complexes},
            {"homogeneous_linewidth", e.homogeneous_linewidth},
            {"gaussian_linewidth", e.gaussian_linewidth}};
}

EmitterSpec emitter_from(const json& j) {
    const std::string p = "emitter";
    reject_unknown(j, p,
                   {"tau_fast", "tau_slow", "slow_branch_fraction", "dark_fraction", "complexes",
                    "homogeneous_linewidth", "gaussian_linewidth"});
    EmitterSpec e;
    e.tau_fast = number(j, p, "tau_fast");
    e.tau_slow = number(j, p, "tau_slow");
    e.slow_branch_fraction = number(j, p, "slow_branch_fraction");
    e.dark_fraction = number(j, p, "dark_fraction");
    e.homogeneous_linewidth = number(j, p, "homogeneous_linewidth");
    e.gaussian_linewidth = number(j, p, "gaussian_linewidth");
    const json& list = j.at("complexes");
    if (!list.is_array()) throw ConfigError(p + ".complexes", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string cp = p + ".complexes." + std::to_string(i);
        reject_unknown(list[i], cp, {"tag", "emission_energy", "relative_intensity"});
        const json& tag = list[i].at("tag");
        if (!tag.is_string()) throw ConfigError(cp + ".tag", "expected a string");
        const auto t = complex_tag_from_string(tag.get<std::string>());
        if (!t) throw ConfigError(cp + ".tag", "unknown complex tag '" + tag.get<std::string>() + "'");
        e.complexes.push_back({*t, number(list[i], cp, "emission_energy"),
                               number(list[i], cp, "relative_intensity")});
    }
    return e;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    json detectors = json::array();
    for (const DetectorSpec& d : c.detectors) {
        detectors.push_back({{"efficiency", d.efficiency}, {"jitter_fwhm", d.jitter_fwhm}, {"dead_time", d.dead_time}});
    }
    const ExcitationSpec& x = c.excitation;
    return {{"emitter", emitter_json(c.emitter)},
            {"excitation",
             {{"mode", x.mode == ExcitationMode::CW ? "CW" : "Pulsed"},
              {"rep_rate", x.rep_rate},
              {"pulse_width", x.pulse_width},
              {"power_ratio", x.power_ratio},
              {"recapture_probability_at_sat", x.recapture_probability_at_sat},
              {"recapture_time", x.recapture_time}}},
            {"chain",
             {{"beta", c.chain.beta},
              {"directionality", c.chain.directionality},
              {"sideband_pass", c.chain.sideband_pass},
              {"transmission", c.chain.transmission},
              {"filter_center", c.chain.filter_center},
              {"filter_bandwidth", c.chain.filter_bandwidth}}},
            {"detectors", detectors},
            {"duration", c.duration},
            {"rng_seed", c.rng_seed}};
}

ExperimentConfig config_from_json(const json& doc) {
    reject_unknown(doc, "", {"emitter", "excitation", "chain", "detectors", "duration", "rng_seed"});
    ExperimentConfig c;
    c.emitter = emitter_from(doc.at("emitter"));

    const json& x = doc.at("excitation");
    reject_unknown(x, "excitation",
                   {"mode", "rep_rate", "pulse_width", "power_ratio", "recapture_probability_at_sat",
                    "recapture_time"});
    const json& mode = x.at("mode");
    if (!mode.is_string() || (mode != "CW" && mode != "Pulsed")) {
        throw ConfigError("excitation.mode", "expected \"CW\" or \"Pulsed\"");
    }
    c.excitation.mode = mode == "CW" ? ExcitationMode::CW : ExcitationMode::Pulsed;
    c.excitation.rep_rate = number(x, "excitation", "rep_rate");
    c.excitation.pulse_width = number(x, "excitation", "pulse_width");
    c.excitation.power_ratio = number(x, "excitation", "power_ratio");
    c.excitation.recapture_probability_at_sat = number(x, "excitation", "recapture_probability_at_sat");
    c.excitation.recapture_time = number(x, "excitation", "recapture_time");

    const json& ch = doc.at("chain");
    reject_unknown(ch, "chain",
                   {"beta", "directionality", "sideband_pass", "transmission", "filter_center", "filter_bandwidth"});
    c.chain.beta = number(ch, "chain", "beta");
    c.chain.directionality = number(ch, "chain", "directionality");
    c.chain.sideband_pass = number(ch, "chain", "sideband_pass");
    c.chain.transmission = number(ch, "chain", "transmission");
    c.chain.filter_center = number(ch, "chain", "filter_center");
    c.chain.filter_bandwidth = number(ch, "chain", "filter_bandwidth");

    const json& dets = doc.at("detectors");
    if (!dets.is_array()) throw ConfigError("detectors", "expected an array");
    for (std::size_t i = 0; i < dets.size(); ++i) {
        const std::string p = "detectors." + std::to_string(i);
        reject_unknown(dets[i], p, {"efficiency", "jitter_fwhm", "dead_time"});
        c.detectors.push_back(
            {number(dets[i], p, "efficiency"), number(dets[i], p, "jitter_fwhm"), number(dets[i], p, "dead_time")});
    }
    if (!doc.at("duration").is_number()) throw ConfigError("duration", "expected a number");
    c.duration = doc.at("duration").get<double>();
    const json& seed = doc.at("rng_seed");
    if (!seed.is_number_integer()) throw ConfigError("rng_seed", "expected an integer");
    if (seed.is_number_unsigned()) {
        c.rng_seed = seed.get<std::uint64_t>();
    } else {
        const auto s = seed.get<std::int64_t>();
        if (s < 0) throw ConfigError("rng_seed", "must be non-negative");
        c.rng_seed = static_cast<std::uint64_t>(s);
    }
    return c;
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col),
                          "malformed JSON");
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError(assignment, "override must have the form path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json* node = &doc;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(key);
            } catch (const std::exception&) {
                throw ConfigError(path, "expected an array index at '" + key + "'");
            }
            if (idx >= node->size()) throw ConfigError(path, "array index out of range");
            node = &(*node)[idx];
        } else if (node->is_object() && node->contains(key)) {
            node = &(*node)[key];
        } else {
            throw ConfigError(path, "no such field");
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    *node = value;
}

std::string config_digest(const ExperimentConfig& config) { return sha256_hex(to_json(config).dump()); }

}  // namespace photonstat
