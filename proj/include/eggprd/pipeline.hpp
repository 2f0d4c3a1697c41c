#ifndef EGGPRD_PIPELINE_HPP
#define EGGPRD_PIPELINE_HPP

#include "eggprd/compression.hpp"
#include "eggprd/io.hpp"
#include "eggprd/stats.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <optional>
#include <vector>

namespace eggprd {

/// PRD of every channel of every recording: result[channel][recording].
std::vector<std::vector<double>> channel_prds(std::span<const Recording> group,
                                              const CompressionConfig& cfg, unsigned threads = 0);

/// Per-channel paired comparison of two groups aligned by subject id.
/// Differences are group_b - group_a.
std::vector<ChannelComparison> compare_groups(std::span<const Recording> group_a,
                                              std::span<const Recording> group_b,
                                              const CompressionConfig& cfg,
                                              double alpha = kDefaultAlpha,
                                              std::uint64_t seed = kLillieforsSeed,
                                              unsigned threads = 0);

struct SweepPoint {
    double compression_ratio = 0.0;
    std::string comparison; ///< "basal:mild" or "basal:severe"
    double detection_percent = 0.0;
};

/// Detection rate of basal-vs-mild and basal-vs-severe at every ratio.
std::vector<SweepPoint> cr_sweep(const Cohort& cohort, const WaveletSpec& wavelet,
                                 std::span<const double> ratios, std::optional<int> depth = std::nullopt,
                                 double alpha = kDefaultAlpha, unsigned threads = 0);

/// "cr,comparison,detection_percent"
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);

} // namespace eggprd

#endif
