#include "photonstat/mc/stream_io.hpp"

#include "photonstat/report.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace photonstat::mc {

namespace {

template <typename T>
void put_le(std::string& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view in, std::size_t at) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return static_cast<T>(v);
}

constexpr std::size_t kHeaderSize = 4 + 2 + 2 + 8;

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw StreamFormatError("line " + std::to_string(line) + ": cannot parse '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::string encode_click_stream(const ClickStream& stream) {
    std::string out;
    out.reserve(kHeaderSize + 8 * stream.timestamps.size());
    out.append("PSTM", 4);
    put_le<std::uint16_t>(out, kClickStreamVersion);
    put_le<std::uint16_t>(out, stream.detector_id);
    put_le<std::uint64_t>(out, stream.timestamps.size());
    for (std::uint64_t t : stream.timestamps) put_le<std::uint64_t>(out, t);
    return out;
}

ClickStream decode_click_stream(std::string_view bytes) {
    if (bytes.size() < kHeaderSize || bytes.substr(0, 4) != "PSTM") {
        throw StreamFormatError("click stream: bad magic");
    }
    const auto version = get_le<std::uint16_t>(bytes, 4);
    if (version != kClickStreamVersion) {
        throw StreamFormatError("click stream: unsupported version " + std::to_string(version));
    }
    ClickStream s;
    s.detector_id = get_le<std::uint16_t>(bytes, 6);
    const auto count = get_le<std::uint64_t>(bytes, 8);
    if ((bytes.size() - kHeaderSize) / 8 < count || bytes.size() != kHeaderSize + 8 * count) {
        throw StreamFormatError("click stream: size does not match header count");
    }
    s.timestamps.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        s.timestamps[i] = get_le<std::uint64_t>(bytes, kHeaderSize + 8 * i);
        if (i > 0 && s.timestamps[i] < s.timestamps[i - 1]) {
            throw StreamFormatError("click stream: timestamp " + std::to_string(i) + " decreases");
        }
    }
    return s;
}

std::string click_stream_csv(const ClickStream& stream) {
    std::string out;
    out.reserve(stream.timestamps.size() * 14);
    char buf[24];
    for (std::uint64_t t : stream.timestamps) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), t);
        out.append(buf, res.ptr);
        out.push_back('\n');
    }
    return out;
}

ClickStream parse_click_stream_csv(std::string_view text, std::uint16_t detector_id) {
    ClickStream s;
    s.detector_id = detector_id;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto t = parse_number<std::uint64_t>(lines[i], i + 1);
        if (!s.timestamps.empty() && t < s.timestamps.back()) {
            throw StreamFormatError("line " + std::to_string(i + 1) + ": timestamps must not decrease");
        }
        s.timestamps.push_back(t);
    }
    return s;
}

std::string photons_csv(std::span<const PhotonRecord> photons) {
    std::string out = "pulse_index,time_ps,complex,is_reexcitation\n";
    for (const PhotonRecord& p : photons) {
        out += std::to_string(p.pulse_index);
        out += ',';
        out += format_double(p.emission_time);
        out += ',';
        out += to_string(p.complex);
        out += p.is_reexcitation ? ",1\n" : ",0\n";
    }
    return out;
}

std::vector<PhotonRecord> parse_photons_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "pulse_index,time_ps,complex,is_reexcitation") {
        throw StreamFormatError("photon csv: missing header");
    }
    std::vector<PhotonRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::string_view rest = lines[i];
        std::string_view fields[4];
        for (int f = 0; f < 4; ++f) {
            const auto comma = rest.find(',');
            if ((comma == std::string_view::npos) != (f == 3)) {
                throw StreamFormatError("photon csv line " + std::to_string(i + 1) + ": expected 4 fields");
            }
            fields[f] = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        PhotonRecord p;
        p.pulse_index = parse_number<std::uint64_t>(fields[0], i + 1);
        p.emission_time = parse_number<double>(fields[1], i + 1);
        const auto tag = complex_tag_from_string(fields[2]);
        if (!tag) throw StreamFormatError("photon csv line " + std::to_string(i + 1) + ": unknown complex");
        p.complex = *tag;
        if (fields[3] != "0" && fields[3] != "1") {
            throw StreamFormatError("photon csv line " + std::to_string(i + 1) + ": is_reexcitation must be 0 or 1");
        }
        p.is_reexcitation = fields[3] == "1";
        out.push_back(p);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StreamFormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ClickStream read_click_stream(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 4 && bytes.compare(0, 4, "PSTM") == 0) return decode_click_stream(bytes);
    return parse_click_stream_csv(bytes);
}

}  // namespace photonstat::mc
