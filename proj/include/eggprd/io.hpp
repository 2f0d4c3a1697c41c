#ifndef EGGPRD_IO_HPP
#define EGGPRD_IO_HPP

#include "eggprd/wavelet.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eggprd {

/// Malformed or missing input data (as opposed to invalid arguments).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class State { basal, mild, severe };

std::string to_string(State s);
State parse_state(std::string_view text);

/// One multichannel recording. Samples are stored per channel.
struct Recording {
    int subject = 0;
    State state = State::basal;
    double sample_rate_hz = 10.0;
    std::vector<int> channel_ids;
    std::vector<std::vector<double>> channels;

    std::size_t sample_count() const { return channels.empty() ? 0 : channels.front().size(); }
    double duration_s() const { return static_cast<double>(sample_count()) / sample_rate_hz; }
    Signal signal(std::size_t channel_index) const;
    /// Rectangular, unique channel ids, positive rate, finite samples.
    void validate() const;
};

/// Recording CSV:
///
///     # eggprd recording v1
///     # subject: 3
///     # state: basal
///     # sample_rate_hz: 10
///     # duration_s: 600
///     # channels: 7,8,9
///     time_s,ch7,ch8,ch9
///     0,0.125,...
///
/// Numbers are written with 17 significant digits so reading back is exact.
void write_recording(std::ostream& os, const Recording& r);
void write_recording(const std::filesystem::path& path, const Recording& r);

/// Throws DataError naming the line and column of the first problem.
Recording parse_recording(std::istream& is, const std::string& source = "<stream>");
Recording read_recording(const std::filesystem::path& path);

struct ManifestEntry {
    int subject = 0;
    State state = State::basal;
    std::filesystem::path file; ///< resolved against the manifest directory
};

/// Manifest text:
///
///     # eggprd manifest v1
///     seed=7
///     recording=1,basal,s01_basal.csv
///
/// Relative recording paths are resolved against the manifest's directory.
struct Manifest {
    std::optional<std::uint64_t> seed;
    std::vector<ManifestEntry> entries;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
/// Rejects duplicate (subject, state) pairs and lists every missing file.
Manifest read_manifest(const std::filesystem::path& path);

/// All recordings of a dataset.
struct Cohort {
    std::optional<std::uint64_t> seed;
    std::vector<Recording> recordings;

    std::vector<int> subjects() const;
    /// Recordings of one state ordered by subject id.
    std::vector<Recording> group(State s) const;
};

Cohort load_cohort(const Manifest& m);
Cohort load_cohort(const std::filesystem::path& manifest_path);

/// Writes one file per recording plus manifest.txt; returns the manifest path.
std::filesystem::path write_cohort(const std::filesystem::path& dir, const Cohort& c);

} // namespace eggprd

#endif
