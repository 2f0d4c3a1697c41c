#include "eggprd/wavelet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace eggprd {

namespace {

constexpr double kFilterTolerance = 1e-10;

std::vector<double> quadrature_mirror(std::span<const double> h) {
    const std::size_t n = h.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        g[i] = sign * h[n - 1 - i];
    }
    return g;
}

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw std::invalid_argument("invalid number '" + std::string(text) + "' in " +
                                    std::string(what));
    }
    return value;
}

} // namespace

void Signal::validate() const {
    if (samples.empty()) {
        throw std::invalid_argument("signal is empty");
    }
    if (!(sample_period_s > 0.0) || !std::isfinite(sample_period_s)) {
        throw std::invalid_argument("sample period must be positive");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i])) {
            throw std::invalid_argument("signal sample " + std::to_string(i) + " is not finite");
        }
    }
}

FilterPair::FilterPair(std::vector<double> lowpass) : h_(std::move(lowpass)) {
    if (h_.size() < 2 || h_.size() % 2 != 0) {
        throw std::invalid_argument("filter length must be even and at least 2");
    }
    double sum = std::accumulate(h_.begin(), h_.end(), 0.0);
    if (sum < 0.0) {
        for (auto& v : h_) v = -v;
        sum = -sum;
    }
    if (std::abs(sum - std::numbers::sqrt2) > kFilterTolerance) {
        throw std::invalid_argument("low-pass filter is not admissible (sum != sqrt(2))");
    }
    const std::size_t n = h_.size();
    for (std::size_t shift = 0; shift < n; shift += 2) {
        double dot = 0.0;
        for (std::size_t i = 0; i + shift < n; ++i) dot += h_[i] * h_[i + shift];
        const double expected = shift == 0 ? 1.0 : 0.0;
        if (std::abs(dot - expected) > kFilterTolerance) {
            throw std::invalid_argument("low-pass filter is not double-shift orthonormal");
        }
    }
    g_ = quadrature_mirror(h_);
}

NamedWavelet parse_named_wavelet(std::string_view name) {
    if (name == "haar") return NamedWavelet::haar;
    if (name == "daubechies-2" || name == "db2") return NamedWavelet::daubechies2;
    if (name == "daubechies-3" || name == "db3") return NamedWavelet::daubechies3;
    if (name == "coiflet-1" || name == "coif1") return NamedWavelet::coiflet1;
    throw std::invalid_argument("unknown wavelet '" + std::string(name) +
                                "' (expected haar, daubechies-2, daubechies-3 or coiflet-1)");
}

std::string to_string(NamedWavelet w) {
    switch (w) {
    case NamedWavelet::haar: return "haar";
    case NamedWavelet::daubechies2: return "daubechies-2";
    case NamedWavelet::daubechies3: return "daubechies-3";
    case NamedWavelet::coiflet1: return "coiflet-1";
    }
    return "unknown";
}

WaveletSpec parse_wavelet_spec(std::string_view text) {
    constexpr std::string_view kRadians = "pollen:";
    constexpr std::string_view kPiUnits = "pollen-pi:";
    double scale = 1.0;
    std::string_view rest;
    if (text.starts_with(kPiUnits)) {
        rest = text.substr(kPiUnits.size());
        scale = std::numbers::pi;
    } else if (text.starts_with(kRadians)) {
        rest = text.substr(kRadians.size());
    } else {
        return parse_named_wavelet(text);
    }
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) {
        throw std::invalid_argument("pollen wavelet needs two parameters: '" + std::string(text) + "'");
    }
    PollenPoint p{parse_double(rest.substr(0, comma), "pollen parameter a") * scale,
                  parse_double(rest.substr(comma + 1), "pollen parameter b") * scale};
    // validate range early
    (void)pollen_filter(p);
    return p;
}

std::string to_string(const WaveletSpec& spec) {
    if (const auto* named = std::get_if<NamedWavelet>(&spec)) return to_string(*named);
    const auto& p = std::get<PollenPoint>(spec);
    std::ostringstream os;
    os.precision(17);
    os << "pollen:" << p.a << ',' << p.b;
    return os.str();
}

FilterPair named_wavelet(NamedWavelet w) {
    using std::sqrt;
    switch (w) {
    case NamedWavelet::haar:
        return FilterPair({1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2});
    case NamedWavelet::daubechies2: {
        const double s3 = sqrt(3.0);
        const double k = 4.0 * std::numbers::sqrt2;
        return FilterPair({(1 + s3) / k, (3 + s3) / k, (3 - s3) / k, (1 - s3) / k});
    }
    case NamedWavelet::daubechies3: {
        const double s10 = sqrt(10.0);
        const double r = sqrt(5.0 + 2.0 * s10);
        const double k = 16.0 * std::numbers::sqrt2;
        return FilterPair({(1 + s10 + r) / k, (5 + s10 + 3 * r) / k,
                           (10 - 2 * s10 + 2 * r) / k, (10 - 2 * s10 - 2 * r) / k,
                           (5 + s10 - 3 * r) / k, (1 + s10 - r) / k});
    }
    case NamedWavelet::coiflet1: {
        const double s7 = sqrt(7.0);
        const double k = std::numbers::sqrt2 / 32.0;
        return FilterPair({(1 - s7) * k, (5 + s7) * k, (14 + 2 * s7) * k,
                           (14 - 2 * s7) * k, (1 - s7) * k, (s7 - 3) * k});
    }
    }
    throw std::invalid_argument("unknown wavelet");
}

FilterPair named_wavelet(std::string_view name) { return named_wavelet(parse_named_wavelet(name)); }

FilterPair pollen_filter(double a, double b) {
    constexpr double pi = std::numbers::pi;
    if (!(a >= -pi && a <= pi) || !(b >= -pi && b <= pi)) {
        throw std::invalid_argument("pollen parameters must lie in [-pi, pi]");
    }
    const double ca = std::cos(a), sa = std::sin(a);
    const double cb = std::cos(b), sb = std::sin(b);
    const double cd = std::cos(a - b), sd = std::sin(a - b);

    // Coefficients normalized to sum 2; rescaled to sum sqrt(2) below.
    std::vector<double> h(6);
    h[0] = ((1 + ca + sa) * (1 - cb - sb) + 2 * sb * ca) / 4;
    h[1] = ((1 - ca + sa) * (1 + cb - sb) - 2 * sb * ca) / 4;
    h[2] = (1 + cd + sd) / 2;
    h[3] = (1 + cd - sd) / 2;
    h[4] = 1 - h[0] - h[2];
    h[5] = 1 - h[1] - h[3];
    for (auto& v : h) v /= std::numbers::sqrt2;
    return FilterPair(std::move(h));
}

FilterPair resolve(const WaveletSpec& spec) {
    return std::visit([](const auto& s) -> FilterPair {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, NamedWavelet>) {
            return named_wavelet(s);
        } else {
            return pollen_filter(s);
        }
    }, spec);
}

PlaneLocation locate_on_plane(const FilterPair& f) {
    constexpr double pi = std::numbers::pi;
    const auto taps = f.lowpass();
    if (taps.size() > 6) {
        throw std::invalid_argument("only filters of up to six taps lie on the Pollen plane");
    }

    auto distance = [&](double a, double b, std::size_t offset) {
        const auto candidate = pollen_filter(a, b);
        const auto p = candidate.lowpass();
        double d2 = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            const double t = (i >= offset && i - offset < taps.size()) ? taps[i - offset] : 0.0;
            d2 += (p[i] - t) * (p[i] - t);
        }
        return std::sqrt(d2);
    };

    PlaneLocation best{{0.0, 0.0}, std::numeric_limits<double>::infinity(), 0};
    constexpr int kCoarse = 72;
    for (std::size_t offset = 0; offset + taps.size() <= 6; ++offset) {
        for (int i = 0; i <= kCoarse; ++i) {
            for (int j = 0; j <= kCoarse; ++j) {
                const double a = -pi + 2 * pi * i / kCoarse;
                const double b = -pi + 2 * pi * j / kCoarse;
                const double d = distance(a, b, offset);
                if (d < best.residual) best = {{a, b}, d, offset};
            }
        }
    }

    // Pattern search refinement inside the plane.
    double step = 2 * pi / kCoarse;
    while (step > 1e-13) {
        bool moved = false;
        for (const auto& [da, db] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const double a = std::clamp(best.point.a + da * step, -pi, pi);
            const double b = std::clamp(best.point.b + db * step, -pi, pi);
            const double d = distance(a, b, best.offset);
            if (d < best.residual) {
                best.point = {a, b};
                best.residual = d;
                moved = true;
            }
        }
        if (!moved) step /= 2;
    }
    return best;
}

} // namespace eggprd
