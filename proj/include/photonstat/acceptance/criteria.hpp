#pragma once

// Acceptance suite shared by the test binary and `photonstat reproduce`.

#include "photonstat/model.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace photonstat::acceptance {

struct CriterionInfo {
    std::string id;
    std::string title;
};

struct Options {
    /// Multiplies every tolerance band; values below 1 tighten the checks.
    double tolerance_scale = 1.0;
    unsigned threads = 0;
};

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    bool excluded = false;  ///< documented as not reproducible; never counted as a failure
    std::string detail;
    double seconds = 0.0;
    nlohmann::json values;  ///< measured numbers, for the report bundle

    /// "PASS", "FAIL" or "N/A".
    std::string status() const;
    /// One line: "<id> <status> <title>: <detail>".
    std::string line() const;
};

const std::vector<CriterionInfo>& criteria();

/// Throws std::invalid_argument for an unknown id.
CriterionResult run_criterion(const std::string& id, const Options& options = {});

/// Runs the listed ids (all when empty) in order.
std::vector<CriterionResult> run_suite(const std::vector<std::string>& ids, const Options& options = {});

/// True when no non-excluded criterion failed.
bool all_passed(const std::vector<CriterionResult>& results);

nlohmann::json results_json(const std::vector<CriterionResult>& results, const Options& options);

// Scenario configs used by the suite, exposed so tests and the CLI can run
// the same experiments.

/// HBT purity scenario: 40 MHz, lossless chain, no slow channel, two
/// detectors with 200 ps jitter behind a 50:50 splitter.
ExperimentConfig purity_scenario(double recapture_at_sat, double power_ratio, double pulses);

/// Lifetime scenario: 10 MHz, lossless chain, one detector, slow branch 10%
/// with tau_slow = 30 ns.
ExperimentConfig lifetime_scenario(double pulses);

}  // namespace photonstat::acceptance
