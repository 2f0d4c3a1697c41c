#include "eggprd/compression.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eggprd {

namespace {

// center_frequency is comparatively expensive; depth selection reuses it.
double cached_center_frequency(const FilterPair& f) {
    static std::mutex mutex;
    static std::map<std::vector<double>, double> cache;
    std::vector<double> key(f.lowpass().begin(), f.lowpass().end());
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const double fc = center_frequency(f);
    std::lock_guard lock(mutex);
    cache.emplace(std::move(key), fc);
    return fc;
}

// Flat indices of the `keep` largest magnitudes, ascending. Equivalent to a
// full sort by (|c| desc, index asc) truncated to `keep`.
std::vector<std::size_t> largest_indices(std::span<const double> flat, std::size_t keep) {
    std::vector<std::size_t> out;
    if (keep >= flat.size()) {
        out.resize(flat.size());
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
    std::vector<double> mags(flat.size());
    std::transform(flat.begin(), flat.end(), mags.begin(), [](double v) { return std::abs(v); });
    auto nth = mags.begin() + static_cast<std::ptrdiff_t>(keep - 1);
    std::nth_element(mags.begin(), nth, mags.end(), std::greater<>());
    const double cutoff = *nth;
    const auto above = static_cast<std::size_t>(
        std::count_if(mags.begin(), mags.end(), [cutoff](double m) { return m > cutoff; }));
    std::size_t ties_left = keep - above;
    out.reserve(keep);
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double m = std::abs(flat[i]);
        if (m > cutoff) {
            out.push_back(i);
        } else if (m == cutoff && ties_left > 0) {
            out.push_back(i);
            --ties_left;
        }
    }
    return out;
}

} // namespace

void CompressionConfig::validate() const {
    if (!(compression_ratio >= 1.0) || !std::isfinite(compression_ratio)) {
        throw std::invalid_argument("compression ratio must be >= 1");
    }
    if (depth && *depth < 1) {
        throw std::invalid_argument("depth must be >= 1");
    }
    if (!depth && !(target_hz > 0.0)) {
        throw std::invalid_argument("automatic depth needs a positive target frequency");
    }
}

std::size_t kept_count(std::size_t total, double compression_ratio) {
    if (!(compression_ratio >= 1.0)) throw std::invalid_argument("compression ratio must be >= 1");
    const auto m = static_cast<std::size_t>(std::floor(static_cast<double>(total) / compression_ratio));
    return std::max<std::size_t>(1, m);
}

DwtCoefficients keep_largest(const DwtCoefficients& c, std::size_t keep,
                             std::vector<std::size_t>* kept_indices) {
    const std::size_t total = c.total_count();
    if (keep < 1 || keep > total) {
        throw std::invalid_argument("keep count " + std::to_string(keep) + " outside 1.." +
                                    std::to_string(total));
    }
    const auto flat = c.flatten();
    auto kept = largest_indices(flat, keep);
    std::vector<double> thresholded(flat.size(), 0.0);
    for (auto i : kept) thresholded[i] = flat[i];
    DwtCoefficients out = c;
    out.assign_flat(thresholded);
    if (kept_indices) *kept_indices = std::move(kept);
    return out;
}

double prd(std::span<const double> reference, std::span<const double> approximation) {
    if (reference.size() != approximation.size()) {
        throw std::invalid_argument("PRD needs signals of equal length");
    }
    double err = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = reference[i] - approximation[i];
        err += d * d;
        energy += reference[i] * reference[i];
    }
    if (!(energy > 0.0)) {
        throw std::invalid_argument("PRD reference signal has zero energy");
    }
    return std::sqrt(err / energy) * 100.0;
}

double prd(const Signal& reference, const Signal& approximation) {
    return prd(std::span<const double>(reference.samples), std::span<const double>(approximation.samples));
}

int resolve_depth(const CompressionConfig& cfg, const FilterPair& f, std::size_t n,
                  double sample_period_s) {
    const int limit = max_depth(n);
    if (cfg.depth) {
        if (*cfg.depth > limit) {
            throw std::invalid_argument("depth " + std::to_string(*cfg.depth) + " too large for " +
                                        std::to_string(n) + " samples");
        }
        return *cfg.depth;
    }
    if (limit < 1) throw std::invalid_argument("signal too short for any decomposition");
    const double fc = cached_center_frequency(f);
    int best = 1;
    double best_gap = std::abs(pseudo_frequency(fc, 1, sample_period_s) - cfg.target_hz);
    for (int j = 2; j <= limit; ++j) {
        const double gap = std::abs(pseudo_frequency(fc, j, sample_period_s) - cfg.target_hz);
        if (gap < best_gap) {
            best_gap = gap;
            best = j;
        }
    }
    return best;
}

CompressionResult compress(const Signal& x, const FilterPair& f, int depth, double compression_ratio) {
    x.validate();
    const auto coeffs = dwt_forward(std::span<const double>(x.samples), f, depth);
    CompressionResult r;
    r.depth = depth;
    r.total_coefficients = coeffs.total_count();
    r.kept = kept_count(r.total_coefficients, compression_ratio);
    const auto thresholded = keep_largest(coeffs, r.kept, &r.kept_indices);
    r.reconstruction = dwt_inverse(thresholded, f, x.sample_period_s);
    r.prd_percent = prd(x, r.reconstruction);
    return r;
}

CompressionResult compress(const Signal& x, const CompressionConfig& cfg) {
    cfg.validate();
    x.validate();
    const auto f = resolve(cfg.wavelet);
    const int depth = resolve_depth(cfg, f, x.size(), x.sample_period_s);
    return compress(x, f, depth, cfg.compression_ratio);
}

double compression_prd(std::span<const double> x, const FilterPair& f, int depth,
                       double compression_ratio) {
    auto coeffs = dwt_forward(x, f, depth);
    const std::size_t total = coeffs.total_count();
    const auto keep = kept_count(total, compression_ratio);
    if (keep < total) {
        // Same keep-set as keep_largest, applied in place.
        std::vector<double> mags;
        mags.reserve(total);
        auto collect = [&](const std::vector<double>& v) {
            for (double c : v) mags.push_back(std::abs(c));
        };
        collect(coeffs.approximation);
        for (auto it = coeffs.details.rbegin(); it != coeffs.details.rend(); ++it) collect(*it);
        auto nth = mags.begin() + static_cast<std::ptrdiff_t>(keep - 1);
        std::nth_element(mags.begin(), nth, mags.end(), std::greater<>());
        const double cutoff = *nth;
        const auto above = static_cast<std::size_t>(
            std::count_if(mags.begin(), mags.end(), [cutoff](double m) { return m > cutoff; }));
        std::size_t ties_left = keep - above;
        auto apply = [&](std::vector<double>& v) {
            for (double& c : v) {
                const double m = std::abs(c);
                if (m > cutoff) continue;
                if (m == cutoff && ties_left > 0) {
                    --ties_left;
                    continue;
                }
                c = 0.0;
            }
        };
        apply(coeffs.approximation);
        for (auto it = coeffs.details.rbegin(); it != coeffs.details.rend(); ++it) apply(*it);
    }
    const auto recon = dwt_inverse(coeffs, f);
    return prd(x, recon.samples);
}

} // namespace eggprd
