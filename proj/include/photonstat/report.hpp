#pragma once

// JSON report envelope shared by every analysis, plus the small file helpers
// the CLI needs (digests, atomic writes).

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace photonstat {

inline constexpr std::string_view kToolVersion = PHOTONSTAT_VERSION;
inline constexpr std::string_view kReportSchema = "photonstat-report/1";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ReportProvenance {
    std::string input_digest;  ///< digest of the analysed stream or config
    std::optional<std::uint64_t> rng_seed;
};

/// {schema, kind, tool_version, rng: {algorithm, seed}, input_digest,
///  result, error}. Exactly one of result / error is non-null.
nlohmann::json make_report(std::string_view kind, const nlohmann::json& result, const ReportProvenance& prov);
nlohmann::json make_error_report(std::string_view kind, std::string_view error_type, std::string_view message,
                                 const ReportProvenance& prov);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Pretty JSON with a trailing newline; deterministic key order.
std::string dump_json(const nlohmann::json& j);

/// Shortest round-trip decimal representation, used by every CSV writer.
std::string format_double(double v);

}  // namespace photonstat
