#ifndef EGGPRD_COMPRESSION_HPP
#define EGGPRD_COMPRESSION_HPP

#include "eggprd/wavelet.hpp"

#include <optional>
#include <vector>

namespace eggprd {

struct CompressionConfig {
    WaveletSpec wavelet = NamedWavelet::daubechies3;
    /// nullopt selects the depth from the wavelet's pseudo-frequency.
    std::optional<int> depth;
    double compression_ratio = 3.0;
    double target_hz = kDefaultTargetHz;

    void validate() const;
};

struct CompressionResult {
    Signal reconstruction;
    int depth = 0;
    std::size_t kept = 0;               ///< M
    std::size_t total_coefficients = 0;
    double prd_percent = 0.0;
    std::vector<std::size_t> kept_indices; ///< flat indices, ascending
};

/// Number of retained coefficients: max(1, floor(total / cr)).
std::size_t kept_count(std::size_t total, double compression_ratio);

/// Hard thresholding that keeps the `keep` largest magnitudes. Ties at the
/// cutoff go to the smaller flat index (a_J0, d_J0 .. d_1).
DwtCoefficients keep_largest(const DwtCoefficients& c, std::size_t keep,
                             std::vector<std::size_t>* kept_indices = nullptr);

/// Percent root-mean-square difference between a reference and its approximation.
double prd(std::span<const double> reference, std::span<const double> approximation);
double prd(const Signal& reference, const Signal& approximation);

/// Depth used for a signal of n samples under cfg (fixed or pseudo-frequency matched).
int resolve_depth(const CompressionConfig& cfg, const FilterPair& f, std::size_t n,
                  double sample_period_s);

/// Forward transform, keep-M thresholding, inverse transform and PRD.
CompressionResult compress(const Signal& x, const CompressionConfig& cfg);
CompressionResult compress(const Signal& x, const FilterPair& f, int depth, double compression_ratio);

/// PRD only; skips assembling the result record.
double compression_prd(std::span<const double> x, const FilterPair& f, int depth,
                       double compression_ratio);

} // namespace eggprd

#endif
