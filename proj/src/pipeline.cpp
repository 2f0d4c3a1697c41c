#include "eggprd/pipeline.hpp"

#include "eggprd/parallel.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace eggprd {

std::vector<std::vector<double>> channel_prds(std::span<const Recording> group,
                                              const CompressionConfig& cfg, unsigned threads) {
    cfg.validate();
    if (group.empty()) throw std::invalid_argument("empty recording group");
    const auto f = resolve(cfg.wavelet);
    const std::size_t channels = group.front().channels.size();
    for (const auto& r : group) {
        r.validate();
        if (r.channel_ids != group.front().channel_ids) {
            throw DataError("recordings in a group have different channel layouts");
        }
    }
    std::vector<std::vector<double>> out(channels, std::vector<double>(group.size(), 0.0));
    parallel_for(channels * group.size(), [&](std::size_t k) {
        const std::size_t ch = k / group.size();
        const std::size_t rec = k % group.size();
        const auto signal = group[rec].signal(ch);
        const int depth = resolve_depth(cfg, f, signal.size(), signal.sample_period_s);
        out[ch][rec] = compression_prd(signal.samples, f, depth, cfg.compression_ratio);
    }, threads);
    return out;
}

std::vector<ChannelComparison> compare_groups(std::span<const Recording> group_a,
                                              std::span<const Recording> group_b,
                                              const CompressionConfig& cfg, double alpha,
                                              std::uint64_t seed, unsigned threads) {
    if (group_a.size() != group_b.size()) {
        throw DataError("mismatched subjects: groups have " + std::to_string(group_a.size()) + " and " +
                        std::to_string(group_b.size()) + " recordings");
    }
    for (std::size_t i = 0; i < group_a.size(); ++i) {
        if (group_a[i].subject != group_b[i].subject) {
            throw DataError("mismatched subjects: " + std::to_string(group_a[i].subject) + " vs " +
                            std::to_string(group_b[i].subject));
        }
        if (group_a[i].channel_ids != group_b[i].channel_ids) {
            throw DataError("channel layouts differ for subject " + std::to_string(group_a[i].subject));
        }
    }
    const auto prd_a = channel_prds(group_a, cfg, threads);
    const auto prd_b = channel_prds(group_b, cfg, threads);
    std::vector<ChannelComparison> rows;
    rows.reserve(prd_a.size());
    for (std::size_t ch = 0; ch < prd_a.size(); ++ch) {
        rows.push_back(compare_paired(prd_a[ch], prd_b[ch], group_a.front().channel_ids[ch], alpha, seed));
    }
    return rows;
}

std::vector<SweepPoint> cr_sweep(const Cohort& cohort, const WaveletSpec& wavelet,
                                 std::span<const double> ratios, std::optional<int> depth, double alpha,
                                 unsigned threads) {
    if (ratios.empty()) throw std::invalid_argument("sweep needs at least one compression ratio");
    const auto basal = cohort.group(State::basal);
    const auto mild = cohort.group(State::mild);
    const auto severe = cohort.group(State::severe);
    if (basal.empty() || mild.empty() || severe.empty()) {
        throw DataError("sweep needs basal, mild and severe recordings");
    }
    std::vector<SweepPoint> points;
    for (double cr : ratios) {
        CompressionConfig cfg;
        cfg.wavelet = wavelet;
        cfg.depth = depth;
        cfg.compression_ratio = cr;
        const auto vs_mild = compare_groups(basal, mild, cfg, alpha, kLillieforsSeed, threads);
        const auto vs_severe = compare_groups(basal, severe, cfg, alpha, kLillieforsSeed, threads);
        points.push_back({cr, "basal:mild", detection_rate(vs_mild)});
        points.push_back({cr, "basal:severe", detection_rate(vs_severe)});
    }
    return points;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
    os << "cr,comparison,detection_percent\n";
    char buf[64];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.6g", p.compression_ratio);
        os << buf << ',' << p.comparison << ',';
        std::snprintf(buf, sizeof buf, "%.2f", p.detection_percent);
        os << buf << '\n';
    }
}

} // namespace eggprd
