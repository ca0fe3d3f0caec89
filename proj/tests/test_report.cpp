#include <doctest.h>

#include "photonstat/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace photonstat;

TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("report envelope") {
    const auto r = make_report("g2", {{"g2_zero", 0.04}}, {"abc", 7});
    CHECK(r.at("kind") == "g2");
    CHECK(r.at("schema") == std::string(kReportSchema));
    CHECK(r.at("rng").at("algorithm") == "philox4x32-10");
    CHECK(r.at("rng").at("seed") == 7);
    CHECK(r.at("error").is_null());
    CHECK(r.at("result").at("g2_zero") == 0.04);

    const auto e = make_error_report("lifetime", "insufficient_counts", "too few", {"abc", std::nullopt});
    CHECK(e.at("result").is_null());
    CHECK(e.at("error").at("type") == "insufficient_counts");
    CHECK(e.at("rng").at("seed").is_null());
    CHECK(dump_json(e).back() == '\n');
}

TEST_CASE("shortest round-trip doubles") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("atomic writes") {
    const auto dir = std::filesystem::temp_directory_path() / "photonstat_report_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "a.txt", "first");
    write_file_atomic(dir / "a.txt", "second");
    std::ifstream in(dir / "a.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "second");
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
    CHECK(sha256_file(dir / "a.txt") == sha256_hex("second"));
    std::filesystem::remove_all(dir);
}
