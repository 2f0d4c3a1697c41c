#ifndef EGGPRD_MATCHER_HPP
#define EGGPRD_MATCHER_HPP

#include "eggprd/wavelet.hpp"

#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

namespace eggprd {

/// Regular grid over the Pollen plane; both ends of each range are nodes.
struct GridSpec {
    std::size_t resolution = 64;
    double a_min = -std::numbers::pi;
    double a_max = std::numbers::pi;
    double b_min = -std::numbers::pi;
    double b_max = std::numbers::pi;

    void validate() const;
    double a(std::size_t i) const;
    double b(std::size_t j) const;
    double a_step() const;
    double b_step() const;
};

struct SurfacePoint {
    double a = 0.0;
    double b = 0.0;
    double prd = 0.0;
};

/// PRD sampled on a GridSpec. Values are stored a-major: value(i, j) is at
/// (grid.a(i), grid.b(j)).
struct PrdSurface {
    GridSpec grid;
    std::vector<double> values;
    double compression_ratio = 0.0;
    int depth = 0;

    double value(std::size_t i, std::size_t j) const { return values[i * grid.resolution + j]; }
    SurfacePoint node(std::size_t i, std::size_t j) const { return {grid.a(i), grid.b(j), value(i, j)}; }
    SurfacePoint argmin() const;
    /// Node closest to (a, b).
    SurfacePoint nearest(double a, double b) const;
};

/// Evaluates compression PRD for pollen_filter(a, b) at every node. With
/// several channels the node value is their mean PRD. `threads` = 0 uses
/// all hardware threads; output is identical for any thread count.
PrdSurface prd_surface(std::span<const Signal> channels, const GridSpec& grid,
                       double compression_ratio, int depth, unsigned threads = 0);
PrdSurface prd_surface(const Signal& x, const GridSpec& grid, double compression_ratio,
                       int depth, unsigned threads = 0);

/// Global argmin first, then strict 8-neighbour local minima ascending by PRD.
/// Ties are broken by (a, b) lexicographically.
std::vector<SurfacePoint> surface_minima(const PrdSurface& s);

/// Re-samples an 8x8 sub-grid spanning one cell around the global argmin.
PrdSurface refine_around_argmin(std::span<const Signal> channels, const PrdSurface& coarse,
                                unsigned threads = 0);

/// Component-wise mean of per-recording minima.
PollenPoint aggregate_best(std::span<const PollenPoint> minima);

/// pollen_filter(-a, -b) is the time reverse of pollen_filter(a, b). Maps a
/// point to the representative with a > 0 (or a == 0 and b >= 0).
PollenPoint fold_reversal(PollenPoint p);

struct MatchOptions {
    bool refine = false;
    /// Fold each per-recording minimum onto the a >= 0 half-plane before
    /// averaging, so time-reversed copies of one wavelet do not cancel out.
    bool fold_reversal = true;
    unsigned threads = 0;
};

struct MatchResult {
    /// Grid argmins as found.
    std::vector<PollenPoint> raw_minima;
    /// Points that were averaged (folded when requested).
    std::vector<PollenPoint> per_recording;
    PollenPoint best;
};

/// Global argmin per recording (refined when requested), then their mean.
MatchResult match_recordings(std::span<const std::vector<Signal>> recordings, const GridSpec& grid,
                             double compression_ratio, int depth, const MatchOptions& options = {});

/// CSV with header "a,b,prd"; one row per node in a-major order.
void write_surface_csv(std::ostream& os, const PrdSurface& s);
/// Plain (P2) grayscale raster; dark = low PRD. Columns follow a, rows b from
/// top (b_max) to bottom (b_min).
void write_surface_pgm(std::ostream& os, const PrdSurface& s);

} // namespace eggprd

#endif
