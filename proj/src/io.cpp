#include "eggprd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace eggprd {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRecordingMagic = "# eggprd recording v1";
constexpr std::string_view kManifestMagic = "# eggprd manifest v1";

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, std::size_t column,
                       const std::string& message) {
    std::string where = source + ":" + std::to_string(line);
    if (column > 0) where += ":" + std::to_string(column);
    throw DataError(where + ": " + message);
}

template <class T>
bool parse_number(std::string_view text, T& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

} // namespace

std::string to_string(State s) {
    switch (s) {
    case State::basal: return "basal";
    case State::mild: return "mild";
    case State::severe: return "severe";
    }
    return "unknown";
}

State parse_state(std::string_view text) {
    text = trim(text);
    if (text == "basal") return State::basal;
    if (text == "mild") return State::mild;
    if (text == "severe") return State::severe;
    throw std::invalid_argument("unknown state '" + std::string(text) + "' (expected basal, mild or severe)");
}

Signal Recording::signal(std::size_t channel_index) const {
    return Signal{channels.at(channel_index), 1.0 / sample_rate_hz};
}

void Recording::validate() const {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw DataError("recording sample rate must be positive");
    }
    if (channels.empty() || channels.size() != channel_ids.size()) {
        throw DataError("recording needs one id per channel");
    }
    std::set<int> ids(channel_ids.begin(), channel_ids.end());
    if (ids.size() != channel_ids.size()) throw DataError("recording channel ids are not unique");
    const std::size_t n = channels.front().size();
    for (const auto& c : channels) {
        if (c.size() != n) throw DataError("recording channels have different lengths");
        for (double v : c) {
            if (!std::isfinite(v)) throw DataError("recording contains a non-finite sample");
        }
    }
}

void write_recording(std::ostream& os, const Recording& r) {
    r.validate();
    os << kRecordingMagic << '\n'
       << "# subject: " << r.subject << '\n'
       << "# state: " << to_string(r.state) << '\n'
       << "# sample_rate_hz: " << format17(r.sample_rate_hz) << '\n'
       << "# duration_s: " << format17(r.duration_s()) << '\n'
       << "# channels: ";
    for (std::size_t k = 0; k < r.channel_ids.size(); ++k) os << (k ? "," : "") << r.channel_ids[k];
    os << "\ntime_s";
    for (int id : r.channel_ids) os << ",ch" << id;
    os << '\n';
    const std::size_t n = r.sample_count();
    for (std::size_t i = 0; i < n; ++i) {
        os << format17(static_cast<double>(i) / r.sample_rate_hz);
        for (const auto& c : r.channels) os << ',' << format17(c[i]);
        os << '\n';
    }
}

void write_recording(const fs::path& path, const Recording& r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path.string() + " for writing");
    write_recording(os, r);
    if (!os) throw DataError("failed writing " + path.string());
}

Recording parse_recording(std::istream& is, const std::string& source) {
    Recording r;
    std::map<std::string, std::string> header;
    std::map<std::string, std::size_t> header_line;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(is, line)) fail(source, 1, 0, "empty file");
    ++line_no;
    if (trim(line) != kRecordingMagic) fail(source, line_no, 1, "missing '" + std::string(kRecordingMagic) + "' header");

    bool have_columns = false;
    while (std::getline(is, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.starts_with('#')) {
            const auto body = trim(text.substr(1));
            const auto colon = body.find(':');
            if (colon == std::string_view::npos) fail(source, line_no, 1, "header line without ':'");
            const std::string key(trim(body.substr(0, colon)));
            if (header.contains(key)) fail(source, line_no, 1, "duplicate header key '" + key + "'");
            header[key] = std::string(trim(body.substr(colon + 1)));
            header_line[key] = line_no;
            continue;
        }
        have_columns = true;
        break;
    }

    auto require = [&](const std::string& key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end()) fail(source, line_no, 0, "missing header field '" + key + "'");
        return it->second;
    };

    if (!parse_number(require("subject"), r.subject)) {
        fail(source, header_line["subject"], 0, "invalid subject id");
    }
    try {
        r.state = parse_state(require("state"));
    } catch (const std::invalid_argument& e) {
        fail(source, header_line["state"], 0, e.what());
    }
    if (!parse_number(require("sample_rate_hz"), r.sample_rate_hz) || !(r.sample_rate_hz > 0.0) ||
        !std::isfinite(r.sample_rate_hz)) {
        fail(source, header_line["sample_rate_hz"], 0, "sample rate must be a positive number");
    }
    for (auto cell : split(require("channels"), ',')) {
        int id = 0;
        if (!parse_number(cell, id)) fail(source, header_line["channels"], 0, "invalid channel id '" + std::string(trim(cell)) + "'");
        r.channel_ids.push_back(id);
    }
    if (std::set<int>(r.channel_ids.begin(), r.channel_ids.end()).size() != r.channel_ids.size()) {
        fail(source, header_line["channels"], 0, "channel ids are not unique");
    }

    if (!have_columns) fail(source, line_no + 1, 0, "missing column header line");
    {
        const auto cols = split(trim(line), ',');
        if (cols.size() != r.channel_ids.size() + 1) {
            fail(source, line_no, 0, "column header has " + std::to_string(cols.size()) + " columns, expected " +
                                         std::to_string(r.channel_ids.size() + 1));
        }
        if (trim(cols[0]) != "time_s") fail(source, line_no, 1, "first column must be 'time_s'");
        for (std::size_t k = 0; k < r.channel_ids.size(); ++k) {
            if (trim(cols[k + 1]) != "ch" + std::to_string(r.channel_ids[k])) {
                fail(source, line_no, k + 2, "column name does not match channel id " + std::to_string(r.channel_ids[k]));
            }
        }
    }

    r.channels.assign(r.channel_ids.size(), {});
    while (std::getline(is, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto cells = split(text, ',');
        const std::size_t expected = r.channel_ids.size() + 1;
        if (cells.size() < expected) {
            fail(source, line_no, cells.size() + 1,
                 "missing value (row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(expected) + ")");
        }
        if (cells.size() > expected) {
            fail(source, line_no, expected + 1,
                 "extra value (row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(expected) + ")");
        }
        for (std::size_t k = 0; k < cells.size(); ++k) {
            double v = 0.0;
            if (trim(cells[k]).empty()) fail(source, line_no, k + 1, "missing value");
            if (!parse_number(cells[k], v)) fail(source, line_no, k + 1, "non-numeric value '" + std::string(trim(cells[k])) + "'");
            if (!std::isfinite(v)) fail(source, line_no, k + 1, "non-finite value '" + std::string(trim(cells[k])) + "'");
            if (k > 0) r.channels[k - 1].push_back(v);
        }
    }
    if (r.sample_count() == 0) fail(source, line_no, 0, "recording has no samples");

    if (auto it = header.find("duration_s"); it != header.end()) {
        double duration = 0.0;
        if (!parse_number(it->second, duration)) fail(source, header_line["duration_s"], 0, "invalid duration");
        if (std::abs(duration - r.duration_s()) > 1e-9 * std::max(1.0, duration)) {
            fail(source, header_line["duration_s"], 0, "duration " + it->second + " s does not match " +
                                                          std::to_string(r.sample_count()) + " samples");
        }
    }
    return r;
}

Recording read_recording(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open " + path.string());
    return parse_recording(is, path.string());
}

void write_manifest(const fs::path& path, const Manifest& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path.string() + " for writing");
    os << kManifestMagic << '\n';
    if (m.seed) os << "seed=" << *m.seed << '\n';
    const auto base = path.parent_path();
    for (const auto& e : m.entries) {
        auto rel = e.file.is_absolute() ? e.file.lexically_relative(fs::absolute(base)) : e.file;
        if (rel.empty()) rel = e.file;
        os << "recording=" << e.subject << ',' << to_string(e.state) << ',' << rel.generic_string() << '\n';
    }
    if (!os) throw DataError("failed writing " + path.string());
}

Manifest read_manifest(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open manifest " + path.string());
    const auto source = path.string();
    const auto base = path.parent_path();
    Manifest m;
    std::set<std::pair<int, State>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.starts_with('#')) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) fail(source, line_no, 1, "expected key=value");
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        if (key == "seed") {
            std::uint64_t seed = 0;
            if (!parse_number(value, seed)) fail(source, line_no, eq + 2, "invalid seed");
            m.seed = seed;
        } else if (key == "recording") {
            const auto parts = split(value, ',');
            if (parts.size() != 3) fail(source, line_no, eq + 2, "expected recording=subject,state,path");
            ManifestEntry e;
            if (!parse_number(parts[0], e.subject)) fail(source, line_no, eq + 2, "invalid subject id");
            try {
                e.state = parse_state(parts[1]);
            } catch (const std::invalid_argument& err) {
                fail(source, line_no, 0, err.what());
            }
            fs::path file{std::string(trim(parts[2]))};
            e.file = file.is_absolute() ? file : base / file;
            if (!seen.emplace(e.subject, e.state).second) {
                fail(source, line_no, 0, "duplicate entry for subject " + std::to_string(e.subject) + " state " +
                                             to_string(e.state));
            }
            m.entries.push_back(std::move(e));
        } else {
            fail(source, line_no, 1, "unknown key '" + std::string(key) + "'");
        }
    }
    std::vector<std::string> missing;
    for (const auto& e : m.entries) {
        if (!fs::exists(e.file)) missing.push_back(e.file.string());
    }
    if (!missing.empty()) {
        std::string msg = source + ": missing recording file";
        msg += missing.size() == 1 ? ": " : "s: ";
        for (std::size_t k = 0; k < missing.size(); ++k) msg += (k ? ", " : "") + missing[k];
        throw DataError(msg);
    }
    return m;
}

std::vector<int> Cohort::subjects() const {
    std::set<int> ids;
    for (const auto& r : recordings) ids.insert(r.subject);
    return {ids.begin(), ids.end()};
}

std::vector<Recording> Cohort::group(State s) const {
    std::vector<Recording> out;
    for (const auto& r : recordings) {
        if (r.state == s) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.subject < y.subject; });
    return out;
}

Cohort load_cohort(const Manifest& m) {
    Cohort c;
    c.seed = m.seed;
    c.recordings.reserve(m.entries.size());
    for (const auto& e : m.entries) {
        auto r = read_recording(e.file);
        if (r.subject != e.subject || r.state != e.state) {
            throw DataError(e.file.string() + ": header (subject " + std::to_string(r.subject) + ", " +
                            to_string(r.state) + ") disagrees with manifest");
        }
        c.recordings.push_back(std::move(r));
    }
    return c;
}

Cohort load_cohort(const fs::path& manifest_path) { return load_cohort(read_manifest(manifest_path)); }

fs::path write_cohort(const fs::path& dir, const Cohort& c) {
    fs::create_directories(dir);
    Manifest m;
    m.seed = c.seed;
    for (const auto& r : c.recordings) {
        char name[64];
        std::snprintf(name, sizeof name, "s%02d_%s.csv", r.subject, to_string(r.state).c_str());
        write_recording(dir / name, r);
        m.entries.push_back({r.subject, r.state, name});
    }
    const auto path = dir / "manifest.txt";
    write_manifest(path, m);
    return path;
}

} // namespace eggprd
