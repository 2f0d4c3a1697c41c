#include "eggprd/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <tuple>

namespace eggprd {

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd_of(std::span<const double> x, double mean) {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

void require_finite(std::span<const double> x, const char* what) {
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " contains a non-finite value");
    }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ks_distance_sorted(std::span<const double> sorted, double mean, double sd) {
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = normal_cdf((sorted[i] - mean) / sd);
        const double upper = static_cast<double>(i + 1) / n - f;
        const double lower = f - static_cast<double>(i) / n;
        d = std::max({d, upper, lower});
    }
    return d;
}

using NullKey = std::tuple<std::size_t, std::uint64_t, std::size_t>;

std::shared_ptr<const std::vector<double>> lilliefors_null(std::size_t n, std::uint64_t seed,
                                                           std::size_t draws) {
    static std::mutex mutex;
    static std::map<NullKey, std::shared_ptr<const std::vector<double>>> cache;
    const NullKey key{n, seed, draws};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto null = std::make_shared<std::vector<double>>(draws);
    std::vector<double> sample(n);
    for (std::size_t r = 0; r < draws; ++r) {
        for (auto& v : sample) v = normal(rng);
        std::sort(sample.begin(), sample.end());
        const double m = mean_of(sample);
        (*null)[r] = ks_distance_sorted(sample, m, sd_of(sample, m));
    }
    std::sort(null->begin(), null->end());
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(null)).first->second;
}

} // namespace

std::string to_string(TestName t) {
    switch (t) {
    case TestName::lilliefors: return "lilliefors";
    case TestName::paired_t: return "paired-t";
    case TestName::wilcoxon: return "wilcoxon";
    }
    return "unknown";
}

std::string table_label(TestName t) {
    switch (t) {
    case TestName::lilliefors: return "Lilliefors";
    case TestName::paired_t: return "Student";
    case TestName::wilcoxon: return "Wilcoxon";
    }
    return "unknown";
}

double lilliefors_statistic(std::span<const double> samples) {
    if (samples.size() < 4) throw std::invalid_argument("Lilliefors test needs at least 4 samples");
    require_finite(samples, "sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double m = mean_of(sorted);
    const double sd = sd_of(sorted, m);
    if (!(sd > 0.0)) throw std::invalid_argument("Lilliefors test on a zero-variance sample");
    return ks_distance_sorted(sorted, m, sd);
}

TestOutcome lilliefors(std::span<const double> samples, double alpha, std::uint64_t seed,
                       std::size_t draws) {
    if (draws == 0) throw std::invalid_argument("Lilliefors needs at least one null draw");
    const double d = lilliefors_statistic(samples);
    const auto null = lilliefors_null(samples.size(), seed, draws);
    const auto at_least = static_cast<std::size_t>(null->end() - std::lower_bound(null->begin(), null->end(), d));
    const double p = static_cast<double>(at_least + 1) / static_cast<double>(draws + 1);
    return {TestName::lilliefors, d, p, alpha};
}

TestOutcome paired_t(std::span<const double> diffs, double alpha) {
    if (diffs.size() < 2) throw std::invalid_argument("paired t test needs at least 2 differences");
    require_finite(diffs, "differences");
    const double m = mean_of(diffs);
    const double sd = sd_of(diffs, m);
    if (!(sd > 0.0)) throw std::invalid_argument("paired t test on differences with zero SD");
    const double n = static_cast<double>(diffs.size());
    const double t = m / (sd / std::sqrt(n));
    const boost::math::students_t_distribution<double> dist(n - 1.0);
    const double p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    return {TestName::paired_t, t, p, alpha};
}

TestOutcome wilcoxon_signed_rank(std::span<const double> diffs, double alpha) {
    require_finite(diffs, "differences");
    std::vector<double> nonzero;
    for (double d : diffs) {
        if (d != 0.0) nonzero.push_back(d);
    }
    if (nonzero.empty()) throw std::invalid_argument("degenerate: no differences");
    if (nonzero.size() < 3) {
        throw std::invalid_argument("Wilcoxon test needs at least 3 non-zero differences");
    }
    const std::size_t n = nonzero.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return std::abs(nonzero[l]) < std::abs(nonzero[r]);
    });

    // Doubled mid-ranks stay integral.
    std::vector<std::uint64_t> rank2(n);
    double tie_term = 0.0;
    for (std::size_t first = 0; first < n;) {
        std::size_t last = first;
        while (last + 1 < n && std::abs(nonzero[order[last + 1]]) == std::abs(nonzero[order[first]])) ++last;
        const std::uint64_t doubled = (first + 1) + (last + 1);
        for (std::size_t k = first; k <= last; ++k) rank2[order[k]] = doubled;
        const double t = static_cast<double>(last - first + 1);
        tie_term += t * t * t - t;
        first = last + 1;
    }

    std::uint64_t w2 = 0, total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += rank2[i];
        if (nonzero[i] > 0.0) w2 += rank2[i];
    }
    const double statistic = static_cast<double>(w2) / 2.0;

    double p = 1.0;
    if (n <= kWilcoxonExactLimit) {
        // counts[s] = number of sign assignments whose doubled positive-rank sum is s
        std::vector<std::uint64_t> counts(total2 + 1, 0);
        counts[0] = 1;
        std::uint64_t reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::uint64_t s = reach + 1; s-- > 0;) {
                if (counts[s]) counts[s + rank2[i]] += counts[s];
            }
            reach += rank2[i];
        }
        // |2*W2 - total2| compares doubled deviations without rounding.
        const auto deviation = [&](std::uint64_t s) {
            const auto v = static_cast<std::int64_t>(2 * s) - static_cast<std::int64_t>(total2);
            return v < 0 ? -v : v;
        };
        const auto observed = deviation(w2);
        std::uint64_t extreme = 0;
        for (std::uint64_t s = 0; s <= total2; ++s) {
            if (deviation(s) >= observed) extreme += counts[s];
        }
        p = static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n));
    } else {
        const double nn = static_cast<double>(n);
        const double expected = nn * (nn + 1.0) / 4.0;
        const double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        const double z = std::max(0.0, std::abs(statistic - expected) - 0.5) / std::sqrt(variance);
        p = std::erfc(z / std::numbers::sqrt2);
    }
    return {TestName::wilcoxon, statistic, std::min(1.0, p), alpha};
}

ChannelComparison compare_paired(std::span<const double> group_a, std::span<const double> group_b,
                                 int channel, double alpha, std::uint64_t seed) {
    if (group_a.size() != group_b.size()) {
        throw std::invalid_argument("mismatched subjects: " + std::to_string(group_a.size()) + " vs " +
                                    std::to_string(group_b.size()));
    }
    if (group_a.size() < 3) throw std::invalid_argument("paired comparison needs at least 3 subjects");
    std::vector<double> diffs(group_a.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = group_b[i] - group_a[i];
    require_finite(diffs, "differences");
    if (std::all_of(diffs.begin(), diffs.end(), [](double d) { return d == 0.0; })) {
        throw std::invalid_argument("degenerate: no differences");
    }

    ChannelComparison row;
    row.channel = channel;
    row.mean = mean_of(diffs);
    row.sd = sd_of(diffs, row.mean);

    bool normal = false;
    if (diffs.size() >= 4 && row.sd > 0.0) {
        row.normality = lilliefors(diffs, alpha, seed);
        normal = !row.normality->rejects();
    }
    const TestOutcome outcome = normal ? paired_t(diffs, alpha) : wilcoxon_signed_rank(diffs, alpha);
    row.routed = outcome.test;
    row.p_value = outcome.p_value;
    row.statistic = outcome.statistic;
    row.significant = outcome.rejects();
    return row;
}

double detection_rate(std::span<const ChannelComparison> rows) {
    if (rows.empty()) throw std::invalid_argument("detection rate of an empty table");
    const auto hits = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.significant; });
    return 100.0 * static_cast<double>(hits) / static_cast<double>(rows.size());
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct Cells {
    std::string channel, test, mean, sd, significant, p;
};

Cells cells_of(const ChannelComparison& r) {
    return {std::to_string(r.channel), table_label(r.routed), fixed6(r.mean), fixed6(r.sd),
            r.significant ? "Yes" : "No", fixed6(r.p_value)};
}

constexpr const char* kHeader[] = {"Channel", "Statistics", "ΔPRD Mean", "ΔPRD SD", "Significant?", "p-value"};

// Display width; the header's Δ is two bytes but one column.
std::size_t display_width(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++w;
    }
    return w;
}

} // namespace

void write_comparison_csv(std::ostream& os, std::span<const ChannelComparison> rows) {
    os << kHeader[0];
    for (std::size_t k = 1; k < 6; ++k) os << ',' << kHeader[k];
    os << '\n';
    for (const auto& r : rows) {
        const auto c = cells_of(r);
        os << c.channel << ',' << c.test << ',' << c.mean << ',' << c.sd << ',' << c.significant << ','
           << c.p << '\n';
    }
}

void write_comparison_table(std::ostream& os, std::span<const ChannelComparison> rows) {
    std::vector<std::vector<std::string>> table;
    table.push_back({kHeader, kHeader + 6});
    for (const auto& r : rows) {
        const auto c = cells_of(r);
        table.push_back({c.channel, c.test, c.mean, c.sd, c.significant, c.p});
    }
    std::vector<std::size_t> width(6, 0);
    for (const auto& line : table) {
        for (std::size_t k = 0; k < 6; ++k) width[k] = std::max(width[k], display_width(line[k]));
    }
    for (const auto& line : table) {
        for (std::size_t k = 0; k < 6; ++k) {
            const std::size_t pad = width[k] - display_width(line[k]);
            // text columns left-aligned, numbers right-aligned
            const bool left = k == 1 || k == 4;
            if (!left) os << std::string(pad, ' ');
            os << line[k];
            if (left && k + 1 < 6) os << std::string(pad, ' ');
            if (k + 1 < 6) os << "  ";
        }
        os << '\n';
    }
}

} // namespace eggprd
