#include "eggprd/io.hpp"
#include "eggprd/simulate.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace eggprd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("eggprd_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Recording sample_recording() {
    Recording r;
    r.subject = 3;
    r.state = State::mild;
    r.sample_rate_hz = 10.0;
    r.channel_ids = {7, 8, 11};
    std::mt19937_64 rng(4);
    std::normal_distribution<double> d(0, 1e3);
    r.channels.assign(3, std::vector<double>(50));
    for (auto& ch : r.channels) {
        for (auto& v : ch) v = d(rng) * 1e-7;
    }
    r.channels[0][0] = 0.1;
    r.channels[1][0] = -1e-300;
    return r;
}

std::string valid_text() {
    return "# eggprd recording v1\n"
           "# subject: 2\n"
           "# state: basal\n"
           "# sample_rate_hz: 10\n"
           "# duration_s: 0.3\n"
           "# channels: 7,8\n"
           "time_s,ch7,ch8\n"
           "0,1,2\n"
           "0.1,3,4\n"
           "0.2,5,6\n";
}

Recording parse(const std::string& text) {
    std::istringstream is(text);
    return parse_recording(is, "rec.csv");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("recording round trip is exact") {
    const auto r = sample_recording();
    std::ostringstream os;
    write_recording(os, r);
    const auto back = parse(os.str());
    CHECK(back.subject == r.subject);
    CHECK(back.state == r.state);
    CHECK(back.sample_rate_hz == r.sample_rate_hz);
    CHECK(back.channel_ids == r.channel_ids);
    CHECK(back.channels == r.channels);
    std::ostringstream again;
    write_recording(again, back);
    CHECK(again.str() == os.str());
}

TEST_CASE("parse a hand-written recording") {
    const auto r = parse(valid_text());
    CHECK(r.subject == 2);
    CHECK(r.state == State::basal);
    CHECK(r.channel_ids == std::vector<int>{7, 8});
    CHECK(r.channels[1] == std::vector<double>{2, 4, 6});
    CHECK(r.duration_s() == doctest::Approx(0.3));
    CHECK(r.signal(1).samples == std::vector<double>{2, 4, 6});
    CHECK(r.signal(1).sample_period_s == doctest::Approx(0.1));
}

TEST_CASE("missing cell names line and column") {
    const auto text = replace(valid_text(), "0.1,3,4", "0.1,3");
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("rec.csv:9:3"), DataError);
    const auto empty = replace(valid_text(), "0.1,3,4", "0.1,,4");
    CHECK_THROWS_WITH_AS(parse(empty), doctest::Contains("rec.csv:9:2: missing value"), DataError);
}

TEST_CASE("non-finite and non-numeric values are rejected") {
    CHECK_THROWS_WITH_AS(parse(replace(valid_text(), "0.2,5,6", "0.2,5,nan")), doctest::Contains("rec.csv:10:3"),
                         DataError);
    CHECK_THROWS_WITH_AS(parse(replace(valid_text(), "0.2,5,6", "0.2,inf,6")), doctest::Contains("non-finite"),
                         DataError);
    CHECK_THROWS_WITH_AS(parse(replace(valid_text(), "0.2,5,6", "0.2,5,x")), doctest::Contains("non-numeric"),
                         DataError);
    CHECK_THROWS_AS(parse(replace(valid_text(), "0.2,5,6", "0.2,5,6,7")), DataError);
}

TEST_CASE("header problems") {
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(parse(replace(valid_text(), "# eggprd recording v1", "# something else")), DataError);
    CHECK_THROWS_WITH_AS(parse(replace(valid_text(), "# state: basal\n", "")), doctest::Contains("state"), DataError);
    CHECK_THROWS_AS(parse(replace(valid_text(), "state: basal", "state: fasting")), DataError);
    CHECK_THROWS_AS(parse(replace(valid_text(), "channels: 7,8", "channels: 7,7")), DataError);
    CHECK_THROWS_AS(parse(replace(valid_text(), "time_s,ch7,ch8", "time_s,ch7,ch9")), DataError);
    CHECK_THROWS_AS(parse(replace(valid_text(), "sample_rate_hz: 10", "sample_rate_hz: 0")), DataError);
    CHECK_THROWS_WITH_AS(parse(replace(valid_text(), "duration_s: 0.3", "duration_s: 600")),
                         doctest::Contains("does not match"), DataError);
    CHECK_THROWS_WITH_AS(parse(replace(valid_text(), "0,1,2\n0.1,3,4\n0.2,5,6\n", "")),
                         doctest::Contains("no samples"), DataError);
}

TEST_CASE("a 600 s recording at 10 Hz has 6000 samples") {
    CohortSpec spec;
    spec.channels = 2;
    const auto r = simulate_recording(spec, State::basal, 1);
    std::ostringstream os;
    write_recording(os, r);
    CHECK(os.str().find("# duration_s: 600\n") != std::string::npos);
    const auto back = parse(os.str());
    CHECK(back.sample_count() == 6000);
    CHECK(back.duration_s() == 600.0);
}

TEST_CASE("recording validation") {
    auto r = sample_recording();
    CHECK_NOTHROW(r.validate());
    r.channels[2].pop_back();
    CHECK_THROWS_AS(r.validate(), DataError);
    r = sample_recording();
    r.channel_ids[1] = 7;
    CHECK_THROWS_AS(r.validate(), DataError);
    r = sample_recording();
    r.channels[0][3] = std::nan("");
    CHECK_THROWS_AS(r.validate(), DataError);
}

TEST_CASE("cohort round trip through a manifest") {
    TempDir dir("cohort");
    CohortSpec spec;
    spec.subjects = 2;
    spec.channels = 3;
    spec.duration_s = 20;
    const auto c = simulate_cohort(spec);
    const auto manifest = write_cohort(dir.path, c);
    CHECK(manifest == dir.path / "manifest.txt");
    const auto m = read_manifest(manifest);
    CHECK(m.seed == spec.seed);
    CHECK(m.entries.size() == 6);
    for (const auto& e : m.entries) CHECK(e.file.parent_path() == dir.path);
    const auto back = load_cohort(manifest);
    REQUIRE(back.recordings.size() == c.recordings.size());
    for (std::size_t k = 0; k < c.recordings.size(); ++k) {
        CHECK(back.recordings[k].channels == c.recordings[k].channels);
        CHECK(back.recordings[k].subject == c.recordings[k].subject);
        CHECK(back.recordings[k].state == c.recordings[k].state);
    }
}

TEST_CASE("manifest errors") {
    TempDir dir("manifest");
    CohortSpec spec;
    spec.subjects = 2;
    spec.channels = 1;
    spec.duration_s = 5;
    const auto manifest = simulate_cohort(spec, dir.path);

    SUBCASE("missing files are all listed") {
        fs::remove(dir.path / "s01_mild.csv");
        fs::remove(dir.path / "s02_severe.csv");
        try {
            read_manifest(manifest);
            FAIL("expected a DataError");
        } catch (const DataError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("s01_mild.csv") != std::string::npos);
            CHECK(msg.find("s02_severe.csv") != std::string::npos);
        }
    }
    SUBCASE("duplicate entries") {
        std::ofstream(manifest, std::ios::app) << "recording=1,basal,s01_basal.csv\n";
        CHECK_THROWS_WITH_AS(read_manifest(manifest), doctest::Contains("duplicate"), DataError);
    }
    SUBCASE("header disagrees with the manifest") {
        std::ofstream os(dir.path / "swapped.txt");
        os << "recording=1,mild,s01_basal.csv\n";
        os.close();
        CHECK_THROWS_WITH_AS(load_cohort(dir.path / "swapped.txt"), doctest::Contains("disagrees"), DataError);
    }
    SUBCASE("unknown keys and missing manifest") {
        std::ofstream(dir.path / "bad.txt") << "color=blue\n";
        CHECK_THROWS_WITH_AS(read_manifest(dir.path / "bad.txt"), doctest::Contains("bad.txt:1"), DataError);
        CHECK_THROWS_AS(read_manifest(dir.path / "nope.txt"), DataError);
    }
}

TEST_CASE("state names") {
    for (State s : {State::basal, State::mild, State::severe}) CHECK(parse_state(to_string(s)) == s);
    CHECK_THROWS_AS(parse_state("Basal "), std::invalid_argument);
}

} // TEST_SUITE
