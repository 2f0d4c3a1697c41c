#ifndef EGGPRD_STATS_HPP
#define EGGPRD_STATS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eggprd {

enum class TestName { lilliefors, paired_t, wilcoxon };

std::string to_string(TestName t);
/// Column label used in comparison tables ("Student" / "Wilcoxon").
std::string table_label(TestName t);

struct TestOutcome {
    TestName test = TestName::paired_t;
    double statistic = 0.0;
    double p_value = 1.0;
    double alpha = 0.05;

    bool rejects() const noexcept { return p_value < alpha; }
};

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr std::uint64_t kLillieforsSeed = 0x5eed'1111'2222'3333ULL;
inline constexpr std::size_t kLillieforsDraws = 50'000;

/// Kolmogorov-Smirnov distance between the empirical CDF and a normal CDF
/// with the sample mean and (n-1) standard deviation.
double lilliefors_statistic(std::span<const double> samples);

/// Lilliefors normality test. The p-value is (1 + #{null D >= D}) / (draws + 1)
/// over `draws` standard-normal samples of the same size drawn from `seed`.
/// Null distributions are cached per (n, seed, draws).
TestOutcome lilliefors(std::span<const double> samples, double alpha = kDefaultAlpha,
                       std::uint64_t seed = kLillieforsSeed, std::size_t draws = kLillieforsDraws);

/// Two-sided one-sample t test on paired differences.
TestOutcome paired_t(std::span<const double> diffs, double alpha = kDefaultAlpha);

/// Two-sided Wilcoxon signed-rank test. Zero differences are dropped and tied
/// magnitudes get mid-ranks. Exact sign enumeration for n <= 20, otherwise a
/// normal approximation with tie and continuity corrections. The statistic
/// is the sum of positive ranks.
TestOutcome wilcoxon_signed_rank(std::span<const double> diffs, double alpha = kDefaultAlpha);

inline constexpr std::size_t kWilcoxonExactLimit = 20;

struct ChannelComparison {
    int channel = 0;
    TestName routed = TestName::paired_t;
    double mean = 0.0;
    double sd = 0.0;
    bool significant = false;
    double p_value = 1.0;
    double statistic = 0.0;
    /// Normality gate; empty when it could not be run (n < 4 or zero spread).
    std::optional<TestOutcome> normality;
};

/// Forms group_b - group_a per subject and routes to the paired t test when
/// Lilliefors does not reject normality at alpha, else to Wilcoxon.
ChannelComparison compare_paired(std::span<const double> group_a, std::span<const double> group_b,
                                 int channel, double alpha = kDefaultAlpha,
                                 std::uint64_t seed = kLillieforsSeed);

/// Percentage of significant rows.
double detection_rate(std::span<const ChannelComparison> rows);

/// "Channel,Statistics,ΔPRD Mean,ΔPRD SD,Significant?,p-value" rows.
void write_comparison_csv(std::ostream& os, std::span<const ChannelComparison> rows);
/// Same columns as an aligned plain-text table.
void write_comparison_table(std::ostream& os, std::span<const ChannelComparison> rows);

} // namespace eggprd

#endif
