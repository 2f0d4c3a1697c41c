#ifndef EGGPRD_WAVELET_HPP
#define EGGPRD_WAVELET_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace eggprd {

/// A sampled single-channel signal. Default period is 0.1 s (10 Hz).
struct Signal {
    std::vector<double> samples;
    double sample_period_s = 0.1;

    /// Throws std::invalid_argument if empty, non-finite or the period is not positive.
    void validate() const;
    std::size_t size() const noexcept { return samples.size(); }
};

/// Orthonormal two-channel analysis filter pair.
///
/// Construction normalizes the sign so that sum(h) = +sqrt(2), derives the
/// high-pass filter as g[n] = (-1)^n h[L-1-n] and rejects low-pass filters
/// that are not admissible or not double-shift orthonormal to 1e-10.
class FilterPair {
public:
    explicit FilterPair(std::vector<double> lowpass);

    std::span<const double> lowpass() const noexcept { return h_; }
    std::span<const double> highpass() const noexcept { return g_; }
    std::size_t length() const noexcept { return h_.size(); }

private:
    std::vector<double> h_;
    std::vector<double> g_;
};

enum class NamedWavelet { haar, daubechies2, daubechies3, coiflet1 };

/// A point on the Pollen parameterization plane, in radians.
struct PollenPoint {
    double a = 0.0;
    double b = 0.0;
    friend bool operator==(const PollenPoint&, const PollenPoint&) = default;
};

/// Either a named family or a Pollen plane point.
using WaveletSpec = std::variant<NamedWavelet, PollenPoint>;

/// "haar", "daubechies-2", "daubechies-3", "coiflet-1"; throws on anything else.
NamedWavelet parse_named_wavelet(std::string_view name);
std::string to_string(NamedWavelet w);

/// Parses a named family, "pollen:A,B" (radians) or "pollen-pi:A,B" (multiples of pi).
WaveletSpec parse_wavelet_spec(std::string_view text);
std::string to_string(const WaveletSpec& spec);

FilterPair named_wavelet(NamedWavelet w);
FilterPair named_wavelet(std::string_view name);

/// Six-tap orthonormal filter of the Pollen family. a, b must lie in [-pi, pi].
/// (pi/2, pi/2) yields Haar on taps 2 and 3.
FilterPair pollen_filter(double a, double b);
inline FilterPair pollen_filter(PollenPoint p) { return pollen_filter(p.a, p.b); }

FilterPair resolve(const WaveletSpec& spec);

/// Closest Pollen point to a filter of up to six taps, searching all
/// placements of the taps inside the six-tap window. Used to mark the
/// named wavelets on the plane.
struct PlaneLocation {
    PollenPoint point;
    double residual = 0.0;  ///< L2 distance between the taps
    std::size_t offset = 0; ///< where the first tap sits in the window
};
PlaneLocation locate_on_plane(const FilterPair& f);

/// Subbands from the Mallat pyramid.
///
/// details[0] is the finest (d_1), details.back() the coarsest (d_J0).
/// lengths[j] is the input length at level j+1, so lengths[0] is the
/// original signal length and lengths[J0] the approximation length.
struct DwtCoefficients {
    std::vector<std::vector<double>> details;
    std::vector<double> approximation;
    std::vector<std::size_t> lengths;

    int depth() const noexcept { return static_cast<int>(details.size()); }
    std::size_t total_count() const noexcept;

    /// Flat order: a_J0, d_J0, ..., d_1.
    std::vector<double> flatten() const;
    /// Inverse of flatten(); the receiver supplies the layout.
    void assign_flat(std::span<const double> flat);
};

/// Largest depth allowed for a signal of n samples: floor(log2 n).
int max_depth(std::size_t n);

/// Periodized filter-and-decimate. Odd-length levels are extended by
/// repeating their last sample before decimation.
DwtCoefficients dwt_forward(const Signal& x, const FilterPair& f, int depth);
DwtCoefficients dwt_forward(std::span<const double> x, const FilterPair& f, int depth);

/// Exact inverse of dwt_forward, truncating each level to its recorded length.
Signal dwt_inverse(const DwtCoefficients& c, const FilterPair& f, double sample_period_s = 0.1);

/// Sampled scaling and wavelet functions from the cascade algorithm.
struct WaveletFunction {
    std::vector<double> x;
    std::vector<double> phi;
    std::vector<double> psi;
};
WaveletFunction cascade(const FilterPair& f, int iterations = 10);

/// Peak of |DFT(psi)| over the filter support, in cycles per sample.
double center_frequency(const FilterPair& f);

/// Pseudo-frequency (Hz) of dyadic scale j >= 1: center / (2^j * Ts).
double pseudo_frequency(const FilterPair& f, int scale, double sample_period_s);
double pseudo_frequency(double center_cycles_per_sample, int scale, double sample_period_s);

/// Depth in 1..max_scale whose pseudo-frequency is closest to target_hz.
/// Ties go to the smaller depth.
int select_scales(const FilterPair& f, double sample_period_s, double target_hz,
                  int max_scale = 12);

/// 5 cycles per minute.
inline constexpr double kDefaultTargetHz = 5.0 / 60.0;

} // namespace eggprd

#endif
