#include "oracles.hpp"

#include "eggprd/wavelet.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace eggprd;

namespace {

constexpr double pi = std::numbers::pi;

void check_filter_invariants(const FilterPair& f, double tol) {
    const auto h = f.lowpass();
    const auto g = f.highpass();
    double sum = 0;
    for (double v : h) sum += v;
    CHECK(std::abs(sum - std::numbers::sqrt2) < tol);
    for (std::size_t shift = 0; shift < h.size(); shift += 2) {
        double dot = 0;
        for (std::size_t i = 0; i + shift < h.size(); ++i) dot += h[i] * h[i + shift];
        CHECK(std::abs(dot - (shift == 0 ? 1.0 : 0.0)) < tol);
    }
    const std::size_t L = h.size();
    for (std::size_t n = 0; n < L; ++n) {
        CHECK(g[n] == (n % 2 == 0 ? 1.0 : -1.0) * h[L - 1 - n]);
    }
}

std::vector<double> taps(const FilterPair& f) { return {f.lowpass().begin(), f.lowpass().end()}; }

std::vector<FilterPair> all_named() {
    return {named_wavelet(NamedWavelet::haar), named_wavelet(NamedWavelet::daubechies2),
            named_wavelet(NamedWavelet::daubechies3), named_wavelet(NamedWavelet::coiflet1)};
}

std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    return x;
}

} // namespace

TEST_SUITE("wavelet") {

TEST_CASE("haar taps") {
    const auto f = named_wavelet("haar");
    REQUIRE(f.length() == 2);
    CHECK(f.lowpass()[0] == doctest::Approx(1 / std::numbers::sqrt2));
    CHECK(f.lowpass()[1] == doctest::Approx(1 / std::numbers::sqrt2));
}

TEST_CASE("named families match published coefficients") {
    auto same = [](std::span<const double> got, std::span<const double> want) {
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < oracle::kTabulatedTolerance);
    };
    same(named_wavelet("daubechies-2").lowpass(), oracle::kDaubechies2);
    same(named_wavelet("daubechies-3").lowpass(), oracle::kDaubechies3);
    same(named_wavelet("coiflet-1").lowpass(), oracle::kCoiflet1);
    for (const auto& f : all_named()) check_filter_invariants(f, 1e-12);
}

TEST_CASE("unknown family is rejected") {
    CHECK_THROWS_WITH_AS(named_wavelet("daubechies-4"), doctest::Contains("daubechies-4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_named_wavelet(""), std::invalid_argument);
}

TEST_CASE("filter construction rejects inadmissible taps") {
    CHECK_THROWS_AS(FilterPair({1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(FilterPair({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(FilterPair({0.5, 0.5, 0.2}), std::invalid_argument);
    // sum is fine but not orthonormal
    CHECK_THROWS_AS(FilterPair({0.5, 0.5, 0.414213562373095, 0.0}), std::invalid_argument);
    // negative sum gets flipped
    const FilterPair flipped({-1 / std::numbers::sqrt2, -1 / std::numbers::sqrt2});
    CHECK(flipped.lowpass()[0] > 0);
}

TEST_CASE("pollen filters are admissible over a 32x32 grid") {
    for (int i = 0; i < 32; ++i) {
        for (int j = 0; j < 32; ++j) {
            const double a = -pi + 2 * pi * i / 31, b = -pi + 2 * pi * j / 31;
            const auto f = pollen_filter(a, b);
            REQUIRE(f.length() == 6);
            check_filter_invariants(f, 1e-10);
        }
    }
}

TEST_CASE("pollen point (pi/2, pi/2) is exactly haar") {
    const auto h = taps(pollen_filter(pi / 2, pi / 2));
    CHECK(std::abs(h[2] - 1 / std::numbers::sqrt2) < 1e-10);
    CHECK(std::abs(h[3] - 1 / std::numbers::sqrt2) < 1e-10);
    for (std::size_t i : {0, 1, 4, 5}) CHECK(std::abs(h[i]) < 1e-10);
}

TEST_CASE("pollen point (pi/2, 0) has two equal dominant taps") {
    const auto h = taps(pollen_filter(pi / 2, 0));
    CHECK(oracle::distance_to_haar(h) < 1e-10);
    CHECK(std::abs(h[1] - h[2]) < 1e-12);
}

TEST_CASE("the whole diagonal a == b generates haar") {
    for (int k = 0; k <= 20; ++k) {
        const double a = -pi + 2 * pi * k / 20;
        CHECK(oracle::distance_to_haar(pollen_filter(a, a).lowpass()) < 1e-10);
    }
}

TEST_CASE("(-a, -b) is the time reverse of (a, b)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (int k = 0; k < 50; ++k) {
        const double a = u(rng), b = u(rng);
        const auto h = taps(pollen_filter(a, b));
        const auto r = taps(pollen_filter(-a, -b));
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(h[i] - r[5 - i]) < 1e-12);
    }
}

TEST_CASE("pollen map is continuous") {
    const double eps = 1e-7;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-pi + eps, pi - eps);
    for (int k = 0; k < 100; ++k) {
        const double a = u(rng), b = u(rng);
        const auto h0 = taps(pollen_filter(a, b));
        const auto h1 = taps(pollen_filter(a + eps, b - eps));
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(h0[i] - h1[i]) < 10 * eps);
    }
}

TEST_CASE("pollen parameters outside [-pi, pi] are rejected") {
    CHECK_THROWS_AS(pollen_filter(3.2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pollen_filter(0.0, -3.2), std::invalid_argument);
    CHECK_THROWS_AS(pollen_filter(std::nan(""), 0.0), std::invalid_argument);
    CHECK_NOTHROW(pollen_filter(pi, -pi));
}

TEST_CASE("wavelet spec parsing") {
    CHECK(std::get<NamedWavelet>(parse_wavelet_spec("db3")) == NamedWavelet::daubechies3);
    const auto p = std::get<PollenPoint>(parse_wavelet_spec("pollen-pi:0.43,-0.26"));
    CHECK(p.a == doctest::Approx(0.43 * pi));
    CHECK(p.b == doctest::Approx(-0.26 * pi));
    const auto q = std::get<PollenPoint>(parse_wavelet_spec("pollen:0.43,-0.26"));
    CHECK(q.a == 0.43);
    CHECK_THROWS_AS(parse_wavelet_spec("pollen:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_wavelet_spec("pollen:1,x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_wavelet_spec("pollen:4,0"), std::invalid_argument);
    // round trip through text
    const auto back = std::get<PollenPoint>(parse_wavelet_spec(to_string(WaveletSpec{q})));
    CHECK(back == q);
}

TEST_CASE("named six-tap families sit on the pollen plane") {
    const auto loc3 = locate_on_plane(named_wavelet("daubechies-3"));
    CHECK(loc3.residual < 1e-9);
    CHECK(loc3.point.a / pi == doctest::Approx(0.43284).epsilon(1e-4));
    CHECK(loc3.point.b / pi == doctest::Approx(-0.24895).epsilon(1e-4));
    const auto locc = locate_on_plane(named_wavelet("coiflet-1"));
    CHECK(locc.residual < 1e-9);
    const auto loc2 = locate_on_plane(named_wavelet("daubechies-2"));
    CHECK(loc2.residual < 1e-9);
    // whichever placement was found, the located filter reproduces the taps
    const auto h = taps(pollen_filter(loc2.point));
    const auto d2 = taps(named_wavelet("daubechies-2"));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(h[i + loc2.offset] - d2[i]) < 1e-9);
}

TEST_CASE("max_depth") {
    CHECK(max_depth(1) == 0);
    CHECK(max_depth(2) == 1);
    CHECK(max_depth(4096) == 12);
    CHECK(max_depth(6000) == 12);
}

TEST_CASE("ceil-halving subband lengths for 6000 samples") {
    std::mt19937_64 rng(1);
    const auto x = random_signal(rng, 6000);
    const auto c = dwt_forward(x, named_wavelet("daubechies-3"), 7);
    REQUIRE(c.depth() == 7);
    for (std::size_t j = 0; j < 8; ++j) CHECK(c.lengths[j] == oracle::kLengths6000Depth7[j]);
    for (std::size_t j = 0; j < 7; ++j) CHECK(c.details[j].size() == oracle::kLengths6000Depth7[j + 1]);
    CHECK(c.approximation.size() == 47);
    CHECK(c.total_count() == 6001);
}

TEST_CASE("dyadic length keeps the coefficient count") {
    std::mt19937_64 rng(2);
    const auto x = random_signal(rng, 1024);
    for (const auto& f : all_named()) {
        for (int depth = 1; depth <= 10; ++depth) CHECK(dwt_forward(x, f, depth).total_count() == 1024);
    }
}

TEST_CASE("depth out of range is rejected") {
    std::vector<double> x(100, 1.0);
    const auto f = named_wavelet("haar");
    CHECK_THROWS_AS(dwt_forward(x, f, 0), std::invalid_argument);
    CHECK_THROWS_AS(dwt_forward(x, f, 7), std::invalid_argument);
    CHECK_NOTHROW(dwt_forward(x, f, 6));
    CHECK_THROWS_AS(dwt_forward(std::vector<double>{}, f, 1), std::invalid_argument);
    Signal bad{{1.0, std::nan("")}, 0.1};
    CHECK_THROWS_AS(dwt_forward(bad, f, 1), std::invalid_argument);
}

TEST_CASE("constant signal has no detail energy") {
    std::vector<double> x(256, 3.25);
    for (const auto& f : all_named()) {
        const auto c = dwt_forward(x, f, 8);
        for (const auto& d : c.details) {
            for (double v : d) CHECK(std::abs(v) < 1e-10);
        }
        // zeroing the details still reconstructs the constant
        auto zeroed = c;
        for (auto& d : zeroed.details) std::fill(d.begin(), d.end(), 0.0);
        const auto y = dwt_inverse(zeroed, f);
        for (double v : y.samples) CHECK(std::abs(v - 3.25) < 1e-9);
    }
}

TEST_CASE("perfect reconstruction and parseval") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-pi, pi);
    auto filters = all_named();
    for (int k = 0; k < 5; ++k) filters.push_back(pollen_filter(u(rng), u(rng)));
    for (std::size_t n : {4096, 6000, 1001, 7}) {
        const auto x = random_signal(rng, n);
        double ex = 0;
        for (double v : x) ex += v * v;
        for (const auto& f : filters) {
            const int depth = std::min(max_depth(n), 7);
            const auto c = dwt_forward(x, f, depth);
            const auto y = dwt_inverse(c, f);
            REQUIRE(y.size() == n);
            double err = 0;
            for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(y.samples[i] - x[i]));
            CHECK(err < 1e-9);
            if ((n & (n - 1)) == 0) {
                double ec = 0;
                for (double v : c.flatten()) ec += v * v;
                CHECK(std::abs(ec - ex) / ex < 1e-10);
            }
        }
    }
}

TEST_CASE("zero coefficients give a zero signal") {
    const auto f = named_wavelet("daubechies-2");
    auto c = dwt_forward(std::vector<double>(300, 1.0), f, 5);
    for (auto& d : c.details) std::fill(d.begin(), d.end(), 0.0);
    std::fill(c.approximation.begin(), c.approximation.end(), 0.0);
    for (double v : dwt_inverse(c, f).samples) CHECK(v == 0.0);
}

TEST_CASE("inverse rejects inconsistent bookkeeping") {
    const auto f = named_wavelet("haar");
    auto c = dwt_forward(std::vector<double>(64, 1.0), f, 3);
    auto bad = c;
    bad.lengths.pop_back();
    CHECK_THROWS_AS(dwt_inverse(bad, f), std::invalid_argument);
    bad = c;
    bad.details[1].push_back(0.0);
    CHECK_THROWS_AS(dwt_inverse(bad, f), std::invalid_argument);
    bad = c;
    bad.approximation.clear();
    CHECK_THROWS_AS(dwt_inverse(bad, f), std::invalid_argument);
}

TEST_CASE("transform is deterministic") {
    std::mt19937_64 rng(4);
    const auto x = random_signal(rng, 6000);
    const auto f = pollen_filter(0.3, -1.1);
    const auto a = dwt_forward(x, f, 7).flatten();
    const auto b = dwt_forward(x, f, 7).flatten();
    CHECK(a == b);
}

TEST_CASE("flatten order and assign_flat round trip") {
    std::vector<double> x(16);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i * i % 7);
    const auto c = dwt_forward(x, named_wavelet("haar"), 2);
    const auto flat = c.flatten();
    REQUIRE(flat.size() == 16);
    CHECK(flat[0] == c.approximation[0]);
    CHECK(flat[4] == c.details[1][0]);
    CHECK(flat[8] == c.details[0][0]);
    auto d = c;
    d.assign_flat(flat);
    CHECK(d.flatten() == flat);
    CHECK_THROWS_AS(d.assign_flat(std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("center frequencies agree with an independent refinement oracle") {
    for (const auto& f : all_named()) {
        const double support = static_cast<double>(f.length() - 1);
        const auto psi = oracle::wavelet_by_dyadic_refinement(f.lowpass(), 10);
        const double expected = oracle::dft_peak_frequency(psi, support);
        CHECK(center_frequency(f) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(center_frequency(named_wavelet("haar")) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(center_frequency(named_wavelet("daubechies-2")) - 0.667) < 0.02);
    CHECK(std::abs(center_frequency(named_wavelet("daubechies-3")) - 0.8) < 0.02);
}

TEST_CASE("cascade output has the filter support") {
    const auto w = cascade(named_wavelet("daubechies-3"), 10);
    REQUIRE(w.x.size() == 5 * 1024 + 1);
    CHECK(w.x.front() == 0.0);
    CHECK(w.x.back() == doctest::Approx(5.0));
    // scaling function integrates to one
    double area = 0;
    for (double v : w.phi) area += v;
    CHECK(area / 1024 == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("pseudo-frequency examples") {
    const auto d2 = named_wavelet("daubechies-2");
    const auto d3 = named_wavelet("daubechies-3");
    CHECK(pseudo_frequency(d2, 6, 0.1) == doctest::Approx(0.667 / 6.4).epsilon(0.03));
    CHECK(pseudo_frequency(d2, 6, 0.1) * 60 == doctest::Approx(6.25).epsilon(0.03));
    CHECK(pseudo_frequency(d3, 7, 0.1) * 60 == doctest::Approx(3.75).epsilon(0.03));
    CHECK_THROWS_AS(pseudo_frequency(d2, 0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(pseudo_frequency(d2, 1, 0.0), std::invalid_argument);
}

TEST_CASE("select_scales gives 6, 7, 7 for the 5 cpm target") {
    CHECK(select_scales(named_wavelet("daubechies-2"), 0.1, kDefaultTargetHz) == 6);
    CHECK(select_scales(named_wavelet("daubechies-3"), 0.1, kDefaultTargetHz) == 7);
    CHECK(select_scales(named_wavelet("coiflet-1"), 0.1, kDefaultTargetHz) == 7);
    CHECK_THROWS_AS(select_scales(named_wavelet("haar"), 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("select_scales minimises the pseudo-frequency gap") {
    for (const auto& f : all_named()) {
        for (double target : {0.01, 0.05, 0.0833, 0.2, 1.0}) {
            const int j = select_scales(f, 0.1, target);
            const double gap = std::abs(pseudo_frequency(f, j, 0.1) - target);
            for (int k = 1; k <= 12; ++k) {
                const double other = std::abs(pseudo_frequency(f, k, 0.1) - target);
                CHECK(gap <= other);
                if (other == gap) CHECK(j <= k);
            }
        }
    }
}

} // TEST_SUITE
