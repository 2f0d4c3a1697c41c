#include "eggprd/wavelet.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace eggprd {

namespace {

// Upsample by two and convolve with the filter.
std::vector<double> refine(const std::vector<double>& v, std::span<const double> h) {
    std::vector<double> out(2 * v.size() - 1 + h.size() - 1, 0.0);
    for (std::size_t n = 0; n < v.size(); ++n) {
        for (std::size_t k = 0; k < h.size(); ++k) out[2 * n + k] += v[n] * h[k];
    }
    return out;
}

} // namespace

WaveletFunction cascade(const FilterPair& f, int iterations) {
    if (iterations < 1 || iterations > 20) {
        throw std::invalid_argument("cascade iterations must be in 1..20");
    }
    const auto h = f.lowpass();
    std::vector<double> phi(h.begin(), h.end());
    const auto g = f.highpass();
    std::vector<double> psi(g.begin(), g.end());
    for (int i = 1; i < iterations; ++i) {
        phi = refine(phi, h);
        psi = refine(psi, h);
    }

    const std::size_t per_unit = std::size_t{1} << iterations;
    const std::size_t samples = (f.length() - 1) * per_unit + 1;
    const double scale = std::pow(2.0, iterations / 2.0);
    WaveletFunction w;
    w.x.resize(samples);
    w.phi.assign(samples, 0.0);
    w.psi.assign(samples, 0.0);
    for (std::size_t n = 0; n < samples; ++n) {
        w.x[n] = static_cast<double>(n) / static_cast<double>(per_unit);
        if (n < phi.size()) w.phi[n] = phi[n] * scale;
        if (n < psi.size()) w.psi[n] = psi[n] * scale;
    }
    return w;
}

double center_frequency(const FilterPair& f) {
    const auto w = cascade(f, 10);
    std::vector<double> psi = w.psi;
    const double mean = std::accumulate(psi.begin(), psi.end(), 0.0) / static_cast<double>(psi.size());
    for (auto& v : psi) v -= mean;

    // Bins are spaced 1/support apart in cycles per unit of x.
    const std::size_t n = psi.size();
    const double support = w.x.back() - w.x.front();
    std::size_t best_bin = 1;
    double best_mag = -1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        std::complex<double> acc{0.0, 0.0};
        const double step = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        const std::complex<double> rot{std::cos(step), std::sin(step)};
        std::complex<double> tw{1.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            acc += psi[t] * tw;
            tw *= rot;
            if ((t & 255) == 255) tw /= std::abs(tw);
        }
        const double mag = std::abs(acc);
        if (mag > best_mag) {
            best_mag = mag;
            best_bin = k;
        }
    }
    return static_cast<double>(best_bin) / support;
}

double pseudo_frequency(double center_cycles_per_sample, int scale, double sample_period_s) {
    if (scale < 1) throw std::invalid_argument("scale index must be >= 1");
    if (!(sample_period_s > 0.0)) throw std::invalid_argument("sample period must be positive");
    return center_cycles_per_sample / (std::ldexp(1.0, scale) * sample_period_s);
}

double pseudo_frequency(const FilterPair& f, int scale, double sample_period_s) {
    return pseudo_frequency(center_frequency(f), scale, sample_period_s);
}

int select_scales(const FilterPair& f, double sample_period_s, double target_hz, int max_scale) {
    if (!(target_hz > 0.0)) throw std::invalid_argument("target frequency must be positive");
    if (max_scale < 1) throw std::invalid_argument("max scale must be >= 1");
    const double fc = center_frequency(f);
    int best = 1;
    double best_gap = std::abs(pseudo_frequency(fc, 1, sample_period_s) - target_hz);
    for (int j = 2; j <= max_scale; ++j) {
        const double gap = std::abs(pseudo_frequency(fc, j, sample_period_s) - target_hz);
        if (gap < best_gap) {
            best_gap = gap;
            best = j;
        }
    }
    return best;
}

} // namespace eggprd
