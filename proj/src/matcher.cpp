#include "eggprd/matcher.hpp"

#include "eggprd/compression.hpp"
#include "eggprd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace eggprd {

namespace {

double grid_coordinate(double lo, double hi, std::size_t i, std::size_t n) {
    if (i == 0) return lo;
    if (i + 1 == n) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

bool lexicographically_before(const SurfacePoint& x, const SurfacePoint& y) {
    if (x.prd != y.prd) return x.prd < y.prd;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
}

} // namespace

void GridSpec::validate() const {
    constexpr double pi = std::numbers::pi;
    if (resolution < 8) throw std::invalid_argument("grid resolution must be at least 8");
    auto in_plane = [](double v) { return v >= -pi && v <= pi; };
    if (!in_plane(a_min) || !in_plane(a_max) || !in_plane(b_min) || !in_plane(b_max)) {
        throw std::invalid_argument("grid ranges must lie within [-pi, pi]");
    }
    if (!(a_min < a_max) || !(b_min < b_max)) {
        throw std::invalid_argument("grid ranges must be non-empty");
    }
}

double GridSpec::a(std::size_t i) const { return grid_coordinate(a_min, a_max, i, resolution); }
double GridSpec::b(std::size_t j) const { return grid_coordinate(b_min, b_max, j, resolution); }
double GridSpec::a_step() const { return (a_max - a_min) / static_cast<double>(resolution - 1); }
double GridSpec::b_step() const { return (b_max - b_min) / static_cast<double>(resolution - 1); }

SurfacePoint PrdSurface::argmin() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] < values[best]) best = k;
    }
    return node(best / grid.resolution, best % grid.resolution);
}

SurfacePoint PrdSurface::nearest(double a, double b) const {
    auto index = [n = grid.resolution](double v, double lo, double step) {
        const double k = std::round((v - lo) / step);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n - 1)));
    };
    return node(index(a, grid.a_min, grid.a_step()), index(b, grid.b_min, grid.b_step()));
}

PrdSurface prd_surface(std::span<const Signal> channels, const GridSpec& grid,
                       double compression_ratio, int depth, unsigned threads) {
    grid.validate();
    if (channels.empty()) throw std::invalid_argument("surface needs at least one signal");
    for (const auto& c : channels) {
        c.validate();
        if (depth < 1 || depth > max_depth(c.size())) {
            throw std::invalid_argument("depth " + std::to_string(depth) + " invalid for " +
                                        std::to_string(c.size()) + " samples");
        }
    }
    if (!(compression_ratio >= 1.0)) throw std::invalid_argument("compression ratio must be >= 1");

    PrdSurface s;
    s.grid = grid;
    s.compression_ratio = compression_ratio;
    s.depth = depth;
    const std::size_t n = grid.resolution;
    s.values.assign(n * n, 0.0);
    parallel_for(n * n, [&](std::size_t k) {
        const auto f = pollen_filter(grid.a(k / n), grid.b(k % n));
        double sum = 0.0;
        for (const auto& c : channels) {
            sum += compression_prd(c.samples, f, depth, compression_ratio);
        }
        s.values[k] = sum / static_cast<double>(channels.size());
    }, threads);
    return s;
}

PrdSurface prd_surface(const Signal& x, const GridSpec& grid, double compression_ratio, int depth,
                       unsigned threads) {
    return prd_surface(std::span<const Signal>(&x, 1), grid, compression_ratio, depth, threads);
}

std::vector<SurfacePoint> surface_minima(const PrdSurface& s) {
    const std::size_t n = s.grid.resolution;
    std::vector<SurfacePoint> out;
    if (s.values.empty()) return out;

    const auto global = s.argmin();
    std::vector<SurfacePoint> local;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = s.value(i, j);
            bool strict = true;
            for (int di = -1; di <= 1 && strict; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                    const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(n) ||
                        jj >= static_cast<std::ptrdiff_t>(n)) {
                        continue;
                    }
                    if (!(v < s.value(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)))) {
                        strict = false;
                        break;
                    }
                }
            }
            const auto p = s.node(i, j);
            if (strict && !(p.a == global.a && p.b == global.b)) local.push_back(p);
        }
    }
    std::sort(local.begin(), local.end(), lexicographically_before);
    out.push_back(global);
    out.insert(out.end(), local.begin(), local.end());
    return out;
}

PrdSurface refine_around_argmin(std::span<const Signal> channels, const PrdSurface& coarse,
                                unsigned threads) {
    constexpr double pi = std::numbers::pi;
    const auto best = coarse.argmin();
    GridSpec fine;
    fine.resolution = 8;
    fine.a_min = std::max(-pi, best.a - coarse.grid.a_step());
    fine.a_max = std::min(pi, best.a + coarse.grid.a_step());
    fine.b_min = std::max(-pi, best.b - coarse.grid.b_step());
    fine.b_max = std::min(pi, best.b + coarse.grid.b_step());
    return prd_surface(channels, fine, coarse.compression_ratio, coarse.depth, threads);
}

PollenPoint aggregate_best(std::span<const PollenPoint> minima) {
    if (minima.empty()) throw std::invalid_argument("cannot aggregate an empty list of minima");
    double sa = 0.0, sb = 0.0;
    for (const auto& p : minima) {
        sa += p.a;
        sb += p.b;
    }
    const auto n = static_cast<double>(minima.size());
    return {sa / n, sb / n};
}

PollenPoint fold_reversal(PollenPoint p) {
    if (p.a < 0.0 || (p.a == 0.0 && p.b < 0.0)) return {-p.a, -p.b};
    return p;
}

MatchResult match_recordings(std::span<const std::vector<Signal>> recordings, const GridSpec& grid,
                             double compression_ratio, int depth, const MatchOptions& options) {
    if (recordings.empty()) throw std::invalid_argument("no recordings to match");
    MatchResult r;
    r.raw_minima.reserve(recordings.size());
    for (const auto& channels : recordings) {
        auto surface = prd_surface(channels, grid, compression_ratio, depth, options.threads);
        auto pick = surface.argmin();
        if (options.refine) {
            const auto fine = refine_around_argmin(channels, surface, options.threads).argmin();
            if (fine.prd < pick.prd) pick = fine;
        }
        r.raw_minima.push_back({pick.a, pick.b});
    }
    r.per_recording = r.raw_minima;
    if (options.fold_reversal) {
        for (auto& p : r.per_recording) p = fold_reversal(p);
    }
    r.best = aggregate_best(r.per_recording);
    return r;
}

void write_surface_csv(std::ostream& os, const PrdSurface& s) {
    const auto old_precision = os.precision(17);
    os << "a,b,prd\n";
    const std::size_t n = s.grid.resolution;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto p = s.node(i, j);
            os << p.a << ',' << p.b << ',' << p.prd << '\n';
        }
    }
    os.precision(old_precision);
}

void write_surface_pgm(std::ostream& os, const PrdSurface& s) {
    const std::size_t n = s.grid.resolution;
    const auto [lo_it, hi_it] = std::minmax_element(s.values.begin(), s.values.end());
    const double lo = *lo_it, hi = *hi_it;
    const double span = hi - lo;
    os << "P2\n# PRD surface: dark = low PRD; x = a, y = b (top = max)\n"
       << n << ' ' << n << "\n255\n";
    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t j = n - 1 - row;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = s.value(i, j);
            const int level = span > 0.0 ? static_cast<int>(std::lround(255.0 * (v - lo) / span)) : 0;
            os << level << (i + 1 == n ? '\n' : ' ');
        }
    }
}

} // namespace eggprd
