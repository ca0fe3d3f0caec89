#pragma once

// File formats for click and photon streams.
//
// Binary click stream (little-endian):
//   char[4]  magic "PSTM"
//   u16      version (1)
//   u16      detector_id
//   u64      count
//   u64[count] timestamps in ps
//
// CSV click stream: one timestamp (ps) per line, no header.
// Photon CSV: header "pulse_index,time_ps,complex,is_reexcitation".

#include "photonstat/mc/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace photonstat::mc {

inline constexpr std::uint16_t kClickStreamVersion = 1;

class StreamFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string encode_click_stream(const ClickStream& stream);
ClickStream decode_click_stream(std::string_view bytes);

std::string click_stream_csv(const ClickStream& stream);
ClickStream parse_click_stream_csv(std::string_view text, std::uint16_t detector_id = 0);

std::string photons_csv(std::span<const PhotonRecord> photons);
std::vector<PhotonRecord> parse_photons_csv(std::string_view text);

/// Reads a click stream, choosing the format from the magic bytes.
ClickStream read_click_stream(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace photonstat::mc
