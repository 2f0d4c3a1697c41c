#include "eggprd/wavelet.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace eggprd {

std::size_t DwtCoefficients::total_count() const noexcept {
    std::size_t n = approximation.size();
    for (const auto& d : details) n += d.size();
    return n;
}

std::vector<double> DwtCoefficients::flatten() const {
    std::vector<double> flat;
    flat.reserve(total_count());
    flat.insert(flat.end(), approximation.begin(), approximation.end());
    for (auto it = details.rbegin(); it != details.rend(); ++it) {
        flat.insert(flat.end(), it->begin(), it->end());
    }
    return flat;
}

void DwtCoefficients::assign_flat(std::span<const double> flat) {
    if (flat.size() != total_count()) {
        throw std::invalid_argument("flat coefficient count does not match the layout");
    }
    auto pos = flat.begin();
    std::copy_n(pos, approximation.size(), approximation.begin());
    pos += static_cast<std::ptrdiff_t>(approximation.size());
    for (auto it = details.rbegin(); it != details.rend(); ++it) {
        std::copy_n(pos, it->size(), it->begin());
        pos += static_cast<std::ptrdiff_t>(it->size());
    }
}

int max_depth(std::size_t n) {
    if (n == 0) return 0;
    return static_cast<int>(std::bit_width(n)) - 1;
}

namespace {

// One analysis step over a periodized (even) length.
template <std::size_t Taps>
void analyze_fixed(std::span<const double> x, const double* h, const double* g, double* approx,
                   double* detail, std::size_t taps_rt) {
    const std::size_t taps = Taps ? Taps : taps_rt;
    const std::size_t m = x.size();
    const std::size_t half = m / 2;
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0, d = 0.0;
        const std::size_t start = 2 * k;
        if (start + taps <= m) {
            const double* px = x.data() + start;
            for (std::size_t i = 0; i < taps; ++i) {
                a += h[i] * px[i];
                d += g[i] * px[i];
            }
        } else {
            std::size_t idx = start % m;
            for (std::size_t i = 0; i < taps; ++i) {
                a += h[i] * x[idx];
                d += g[i] * x[idx];
                if (++idx == m) idx = 0;
            }
        }
        approx[k] = a;
        detail[k] = d;
    }
}

void analyze(std::span<const double> x, std::span<const double> h, std::span<const double> g,
             std::vector<double>& approx, std::vector<double>& detail) {
    const std::size_t half = x.size() / 2;
    approx.resize(half);
    detail.resize(half);
    switch (h.size()) {
    case 2: analyze_fixed<2>(x, h.data(), g.data(), approx.data(), detail.data(), 2); break;
    case 4: analyze_fixed<4>(x, h.data(), g.data(), approx.data(), detail.data(), 4); break;
    case 6: analyze_fixed<6>(x, h.data(), g.data(), approx.data(), detail.data(), 6); break;
    default: analyze_fixed<0>(x, h.data(), g.data(), approx.data(), detail.data(), h.size()); break;
    }
}

template <std::size_t Taps>
void synthesize_fixed(std::span<const double> approx, std::span<const double> detail, const double* h,
                      const double* g, double* out, std::size_t taps_rt) {
    const std::size_t taps = Taps ? Taps : taps_rt;
    const std::size_t half = approx.size();
    const std::size_t m = 2 * half;
    for (std::size_t k = 0; k < half; ++k) {
        const double a = approx[k], d = detail[k];
        if (a == 0.0 && d == 0.0) continue;
        const std::size_t start = 2 * k;
        if (start + taps <= m) {
            double* po = out + start;
            for (std::size_t i = 0; i < taps; ++i) po[i] += h[i] * a + g[i] * d;
        } else {
            std::size_t idx = start % m;
            for (std::size_t i = 0; i < taps; ++i) {
                out[idx] += h[i] * a + g[i] * d;
                if (++idx == m) idx = 0;
            }
        }
    }
}

void synthesize(std::span<const double> approx, std::span<const double> detail,
                std::span<const double> h, std::span<const double> g, std::vector<double>& out) {
    out.assign(2 * approx.size(), 0.0);
    switch (h.size()) {
    case 2: synthesize_fixed<2>(approx, detail, h.data(), g.data(), out.data(), 2); break;
    case 4: synthesize_fixed<4>(approx, detail, h.data(), g.data(), out.data(), 4); break;
    case 6: synthesize_fixed<6>(approx, detail, h.data(), g.data(), out.data(), 6); break;
    default: synthesize_fixed<0>(approx, detail, h.data(), g.data(), out.data(), h.size()); break;
    }
}

} // namespace

DwtCoefficients dwt_forward(std::span<const double> x, const FilterPair& f, int depth) {
    if (x.empty()) {
        throw std::invalid_argument("cannot transform an empty signal");
    }
    if (depth < 1 || depth > max_depth(x.size())) {
        throw std::invalid_argument("depth " + std::to_string(depth) + " is invalid for " +
                                    std::to_string(x.size()) + " samples (allowed 1.." +
                                    std::to_string(max_depth(x.size())) + ")");
    }
    DwtCoefficients c;
    c.details.resize(static_cast<std::size_t>(depth));
    c.lengths.reserve(static_cast<std::size_t>(depth) + 1);

    std::vector<double> current(x.begin(), x.end());
    std::vector<double> next;
    for (int level = 0; level < depth; ++level) {
        c.lengths.push_back(current.size());
        if (current.size() % 2 != 0) current.push_back(current.back());
        analyze(current, f.lowpass(), f.highpass(), next, c.details[static_cast<std::size_t>(level)]);
        current.swap(next);
    }
    c.lengths.push_back(current.size());
    c.approximation = std::move(current);
    return c;
}

DwtCoefficients dwt_forward(const Signal& x, const FilterPair& f, int depth) {
    x.validate();
    return dwt_forward(std::span<const double>(x.samples), f, depth);
}

Signal dwt_inverse(const DwtCoefficients& c, const FilterPair& f, double sample_period_s) {
    const auto depth = static_cast<std::size_t>(c.depth());
    if (depth == 0 || c.lengths.size() != depth + 1) {
        throw std::invalid_argument("inconsistent coefficient bookkeeping: depth/lengths mismatch");
    }
    for (std::size_t j = 0; j < depth; ++j) {
        const std::size_t expected = (c.lengths[j] + 1) / 2;
        if (c.lengths[j + 1] != expected || c.details[j].size() != expected) {
            throw std::invalid_argument("inconsistent coefficient bookkeeping at level " +
                                        std::to_string(j + 1));
        }
    }
    if (c.approximation.size() != c.lengths[depth]) {
        throw std::invalid_argument("inconsistent coefficient bookkeeping: approximation length");
    }

    std::vector<double> current = c.approximation;
    std::vector<double> out;
    for (std::size_t j = depth; j-- > 0;) {
        synthesize(current, c.details[j], f.lowpass(), f.highpass(), out);
        out.resize(c.lengths[j]);
        current.swap(out);
    }
    return Signal{std::move(current), sample_period_s};
}

} // namespace eggprd
