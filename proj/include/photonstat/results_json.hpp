#pragma once

// JSON views of analysis results, used as the `result` member of reports.
// Non-finite numbers serialise as null.

#include "photonstat/mc/engine.hpp"
#include "photonstat/photometry/photometry.hpp"
#include "photonstat/spectral/array.hpp"
#include "photonstat/spectral/lineshape.hpp"
#include "photonstat/tcspc/decay.hpp"
#include "photonstat/tcspc/purity.hpp"

#include <json.hpp>

namespace photonstat {

nlohmann::json to_json(const mc::StageCounts& s);
nlohmann::json to_json(const tcspc::DecayFit& f);
nlohmann::json to_json(const tcspc::PurityReport& p);
nlohmann::json to_json(const tcspc::DipFit& d);
nlohmann::json to_json(const photometry::SaturationCurve& c);
nlohmann::json to_json(const photometry::EfficiencyReport& e);
nlohmann::json to_json(const spectral::LinewidthReport& r);
nlohmann::json to_json(const spectral::Classification& c);
/// Summary plus one classification per device.
nlohmann::json to_json(const spectral::YieldReport& y);

}  // namespace photonstat
