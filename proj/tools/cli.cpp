#include "cli.hpp"

#include "eggprd/compression.hpp"
#include "eggprd/io.hpp"
#include "eggprd/matcher.hpp"
#include "eggprd/parallel.hpp"
#include "eggprd/pipeline.hpp"
#include "eggprd/simulate.hpp"
#include "eggprd/stats.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace eggprd::cli {

namespace {

namespace fs = std::filesystem;

/// Flag values that parse but make no sense (bad wavelet name, CR < 1, ...).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::optional<int> parse_depth(const std::string& text) {
    if (text == "auto") return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || v < 1) {
        throw UsageError("--depth must be 'auto' or a positive integer, got '" + text + "'");
    }
    return v;
}

WaveletSpec parse_wavelet(const std::string& text) {
    try {
        return parse_wavelet_spec(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

State parse_state_flag(const std::string& text) {
    try {
        return parse_state(text);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

std::pair<State, State> parse_pair(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw UsageError("--pair must look like basal:severe, got '" + text + "'");
    }
    return {parse_state_flag(text.substr(0, colon)), parse_state_flag(text.substr(colon + 1))};
}

CompressionConfig make_config(const std::string& wavelet, const std::string& depth, double cr) {
    CompressionConfig cfg;
    cfg.wavelet = parse_wavelet(wavelet);
    cfg.depth = parse_depth(depth);
    cfg.compression_ratio = cr;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

/// Writes via `fn` to `path`, or to `fallback` when path is empty or "-".
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(fallback);
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw DataError("cannot write " + path);
    fn(os);
    if (!os) throw DataError("failed while writing " + path);
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string describe(const WaveletSpec& w) {
    if (const auto* p = std::get_if<PollenPoint>(&w)) {
        return "pollen-pi:" + fmt("%.6f", p->a / std::numbers::pi) + "," + fmt("%.6f", p->b / std::numbers::pi);
    }
    return to_string(w);
}

struct SimulateArgs {
    std::string out = "cohort";
    int subjects = 16;
    int channels = 8;
    double duration_s = 600.0;
    double rate_hz = 10.0;
    std::uint64_t seed = 7;
};

struct CompressArgs {
    std::string manifest = "cohort/manifest.txt";
    std::string input;
    std::string state;
    std::string wavelet = "daubechies-3";
    std::string depth = "auto";
    double cr = 3.0;
    std::string out;
};

struct SurfaceArgs {
    std::string input;
    int channel = 0;
    std::size_t square = 0;
    std::size_t block = 8;
    std::uint64_t seed = 1;
    std::string depth = "auto";
    double cr = 3.0;
    std::size_t resolution = 64;
    bool refine = false;
    std::string csv;
    std::string pgm;
};

struct MatchArgs {
    std::string manifest = "cohort/manifest.txt";
    std::string state = "basal";
    std::string depth = "auto";
    double cr = 3.0;
    std::size_t resolution = 64;
    bool refine = false;
    bool no_fold = false;
    std::string out;
};

struct StatsArgs {
    std::string manifest = "cohort/manifest.txt";
    std::string manifest_b;
    std::string pair = "basal:severe";
    std::string wavelet = "daubechies-3";
    std::string depth = "auto";
    double cr = 3.0;
    double alpha = kDefaultAlpha;
    std::uint64_t seed = kLillieforsSeed;
    std::string csv;
    std::string table;
};

struct SweepArgs {
    std::string manifest = "cohort/manifest.txt";
    std::string wavelet = "daubechies-3";
    std::string depth = "auto";
    std::vector<double> crs{2, 3, 4, 5, 8};
    double alpha = kDefaultAlpha;
    std::string out;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
    CohortSpec spec;
    spec.subjects = a.subjects;
    spec.channels = a.channels;
    spec.duration_s = a.duration_s;
    spec.sample_rate_hz = a.rate_hz;
    spec.seed = a.seed;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto manifest = simulate_cohort(spec, fs::path(a.out));
    out << manifest.string() << '\n';
    return kExitOk;
}

int do_compress(const CompressArgs& a, unsigned threads, std::ostream& out) {
    const auto cfg = make_config(a.wavelet, a.depth, a.cr);
    std::optional<State> only;
    if (!a.state.empty()) only = parse_state_flag(a.state);

    std::vector<Recording> recordings;
    if (!a.input.empty()) {
        recordings.push_back(read_recording(a.input));
    } else {
        for (auto& r : load_cohort(fs::path(a.manifest)).recordings) {
            if (!only || r.state == *only) recordings.push_back(std::move(r));
        }
    }
    const auto f = resolve(cfg.wavelet);

    struct Row {
        int subject;
        State state;
        int channel;
        CompressionResult result;
    };
    std::vector<Row> rows;
    for (const auto& r : recordings) {
        for (std::size_t k = 0; k < r.channels.size(); ++k) {
            rows.push_back({r.subject, r.state, r.channel_ids[k], {}});
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> where;
    for (std::size_t i = 0; i < recordings.size(); ++i) {
        for (std::size_t k = 0; k < recordings[i].channels.size(); ++k) where.emplace_back(i, k);
    }
    parallel_for(rows.size(), [&](std::size_t n) {
        const auto [i, k] = where[n];
        const auto x = recordings[i].signal(k);
        const int depth = resolve_depth(cfg, f, x.size(), x.sample_period_s);
        rows[n].result = compress(x, f, depth, cfg.compression_ratio);
    }, threads);

    emit(a.out, out, [&](std::ostream& os) {
        os << "subject,state,channel,wavelet,depth,kept,total,prd_percent\n";
        char buf[64];
        for (const auto& row : rows) {
            std::snprintf(buf, sizeof buf, "%.17g", row.result.prd_percent);
            os << row.subject << ',' << to_string(row.state) << ',' << row.channel << ','
               << describe(cfg.wavelet) << ',' << row.result.depth << ',' << row.result.kept << ','
               << row.result.total_coefficients << ',' << buf << '\n';
        }
    });
    return kExitOk;
}

int do_surface(const SurfaceArgs& a, unsigned threads, std::ostream& out) {
    if (a.input.empty() == (a.square == 0)) {
        throw UsageError("surface needs exactly one of --input or --square");
    }
    if (!(a.cr >= 1.0)) throw UsageError("--cr must be >= 1");
    GridSpec grid;
    grid.resolution = a.resolution;
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    auto depth = parse_depth(a.depth);

    std::vector<Signal> channels;
    if (a.square > 0) {
        if (a.block == 0) throw UsageError("--block must be positive");
        channels.push_back(square_wave(a.square, a.block, a.seed));
    } else {
        const auto r = read_recording(a.input);
        for (std::size_t k = 0; k < r.channels.size(); ++k) {
            if (a.channel == 0 || r.channel_ids[k] == a.channel) channels.push_back(r.signal(k));
        }
        if (channels.empty()) throw DataError("channel ch" + std::to_string(a.channel) + " not in " + a.input);
    }
    if (!depth) {
        // Pollen filters share a support; depth follows the default wavelet.
        CompressionConfig cfg;
        const auto f = resolve(cfg.wavelet);
        depth = resolve_depth(cfg, f, channels.front().size(), channels.front().sample_period_s);
    }

    const auto surface = prd_surface(channels, grid, a.cr, *depth, threads);
    emit(a.csv, out, [&](std::ostream& os) { write_surface_csv(os, surface); });
    if (!a.pgm.empty()) emit(a.pgm, out, [&](std::ostream& os) { write_surface_pgm(os, surface); });

    // Summary goes to stdout only when the CSV went to a file.
    if (!a.csv.empty() && a.csv != "-") {
        const auto minima = surface_minima(surface);
        constexpr double pi = std::numbers::pi;
        out << "depth " << *depth << ", " << minima.size() << " minima\n";
        out << "a/pi,b/pi,prd\n";
        for (const auto& m : minima) {
            out << fmt("%.6f", m.a / pi) << ',' << fmt("%.6f", m.b / pi) << ',' << fmt("%.9g", m.prd) << '\n';
        }
        if (a.refine) {
            const auto fine = refine_around_argmin(channels, surface, threads).argmin();
            out << "refined " << fmt("%.6f", fine.a / pi) << ',' << fmt("%.6f", fine.b / pi) << ','
                << fmt("%.9g", fine.prd) << '\n';
        }
    }
    return kExitOk;
}

int do_match(const MatchArgs& a, unsigned threads, std::ostream& out) {
    const State state = parse_state_flag(a.state);
    auto depth = parse_depth(a.depth);
    if (!(a.cr >= 1.0)) throw UsageError("--cr must be >= 1");
    GridSpec grid;
    grid.resolution = a.resolution;
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const auto cohort = load_cohort(fs::path(a.manifest));
    const auto group = cohort.group(state);
    if (group.empty()) throw DataError("no " + to_string(state) + " recordings in " + a.manifest);
    std::vector<std::vector<Signal>> recordings;
    for (const auto& r : group) {
        auto& chans = recordings.emplace_back();
        for (std::size_t k = 0; k < r.channels.size(); ++k) chans.push_back(r.signal(k));
    }
    if (!depth) {
        CompressionConfig cfg;
        const auto& x = recordings.front().front();
        depth = resolve_depth(cfg, resolve(cfg.wavelet), x.size(), x.sample_period_s);
    }
    MatchOptions opts;
    opts.refine = a.refine;
    opts.fold_reversal = !a.no_fold;
    opts.threads = threads;
    const auto m = match_recordings(recordings, grid, a.cr, *depth, opts);

    constexpr double pi = std::numbers::pi;
    emit(a.out, out, [&](std::ostream& os) {
        os << "subject,a,b,a_over_pi,b_over_pi\n";
        for (std::size_t i = 0; i < group.size(); ++i) {
            const auto& p = m.per_recording[i];
            os << group[i].subject << ',' << fmt("%.17g", p.a) << ',' << fmt("%.17g", p.b) << ','
               << fmt("%.6f", p.a / pi) << ',' << fmt("%.6f", p.b / pi) << '\n';
        }
    });
    if (!a.out.empty() && a.out != "-") {
        out << "a* = " << fmt("%.6f", m.best.a) << " rad (" << fmt("%.4f", m.best.a / pi) << " pi)\n"
            << "b* = " << fmt("%.6f", m.best.b) << " rad (" << fmt("%.4f", m.best.b / pi) << " pi)\n"
            << "wavelet: pollen:" << fmt("%.17g", m.best.a) << ',' << fmt("%.17g", m.best.b) << '\n';
    }
    return kExitOk;
}

int do_stats(const StatsArgs& a, unsigned threads, std::ostream& out) {
    const auto [sa, sb] = parse_pair(a.pair);
    const auto cfg = make_config(a.wavelet, a.depth, a.cr);
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");

    const auto cohort_a = load_cohort(fs::path(a.manifest));
    const auto group_a = cohort_a.group(sa);
    const auto group_b = a.manifest_b.empty() ? cohort_a.group(sb)
                                              : load_cohort(fs::path(a.manifest_b)).group(sb);
    if (group_a.empty() || group_b.empty()) throw DataError("no recordings for pair " + a.pair);
    const auto rows = compare_groups(group_a, group_b, cfg, a.alpha, a.seed, threads);

    if (!a.csv.empty()) emit(a.csv, out, [&](std::ostream& os) { write_comparison_csv(os, rows); });
    emit(a.table, out, [&](std::ostream& os) { write_comparison_table(os, rows); });
    out << "detection rate: " << fmt("%.1f", detection_rate(rows)) << " %\n";
    return kExitOk;
}

int do_sweep(const SweepArgs& a, unsigned threads, std::ostream& out) {
    const auto wavelet = parse_wavelet(a.wavelet);
    const auto depth = parse_depth(a.depth);
    if (a.crs.empty()) throw UsageError("--crs needs at least one ratio");
    for (double cr : a.crs) {
        if (!(cr >= 1.0)) throw UsageError("every ratio in --crs must be >= 1");
    }
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    const auto cohort = load_cohort(fs::path(a.manifest));
    const auto points = cr_sweep(cohort, wavelet, a.crs, depth, a.alpha, threads);
    emit(a.out, out, [&](std::ostream& os) { write_sweep_csv(os, points); });
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wavelet-compression PRD analysis of multichannel EGG recordings", "eggprd"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Write a seeded synthetic cohort");
    c_sim->add_option("--out", sim.out, "Output directory")->capture_default_str();
    c_sim->add_option("--subjects", sim.subjects)->capture_default_str();
    c_sim->add_option("--channels", sim.channels)->capture_default_str();
    c_sim->add_option("--duration", sim.duration_s, "Seconds per recording")->capture_default_str();
    c_sim->add_option("--rate", sim.rate_hz, "Sample rate in Hz")->capture_default_str();
    c_sim->add_option("--seed", sim.seed)->capture_default_str();

    CompressArgs cmp;
    auto* c_cmp = app.add_subcommand("compress", "Per-channel PRD table");
    c_cmp->add_option("--manifest", cmp.manifest)->capture_default_str();
    c_cmp->add_option("--input", cmp.input, "Single recording CSV instead of a manifest");
    c_cmp->add_option("--state", cmp.state, "Only recordings in this state");
    c_cmp->add_option("--wavelet", cmp.wavelet, "Named wavelet, pollen:A,B or pollen-pi:A,B")->capture_default_str();
    c_cmp->add_option("--depth", cmp.depth, "Decomposition depth or 'auto'")->capture_default_str();
    c_cmp->add_option("--cr", cmp.cr, "Compression ratio")->capture_default_str();
    c_cmp->add_option("--out", cmp.out, "CSV path (default stdout)");

    SurfaceArgs srf;
    auto* c_srf = app.add_subcommand("surface", "PRD surface over the Pollen plane");
    c_srf->add_option("--input", srf.input, "Recording CSV");
    c_srf->add_option("--channel", srf.channel, "Channel id (default: mean over all)");
    c_srf->add_option("--square", srf.square, "Use a random square wave of this many samples");
    c_srf->add_option("--block", srf.block, "Square-wave block length")->capture_default_str();
    c_srf->add_option("--seed", srf.seed, "Square-wave seed")->capture_default_str();
    c_srf->add_option("--depth", srf.depth)->capture_default_str();
    c_srf->add_option("--cr", srf.cr)->capture_default_str();
    c_srf->add_option("--resolution", srf.resolution, "Grid nodes per axis")->capture_default_str();
    c_srf->add_flag("--refine", srf.refine, "Report an 8x8 refinement around the argmin");
    c_srf->add_option("--csv", srf.csv, "Surface CSV path (default stdout)");
    c_srf->add_option("--pgm", srf.pgm, "Grayscale raster path");

    MatchArgs mat;
    auto* c_mat = app.add_subcommand("match", "Mean best Pollen wavelet over recordings");
    c_mat->add_option("--manifest", mat.manifest)->capture_default_str();
    c_mat->add_option("--state", mat.state)->capture_default_str();
    c_mat->add_option("--depth", mat.depth)->capture_default_str();
    c_mat->add_option("--cr", mat.cr)->capture_default_str();
    c_mat->add_option("--resolution", mat.resolution)->capture_default_str();
    c_mat->add_flag("--refine", mat.refine);
    c_mat->add_flag("--no-fold", mat.no_fold, "Average minima without folding time-reversed copies");
    c_mat->add_option("--out", mat.out, "Per-recording minima CSV (default stdout)");

    StatsArgs sts;
    auto* c_sts = app.add_subcommand("stats", "Per-channel paired comparison table");
    c_sts->add_option("--manifest", sts.manifest)->capture_default_str();
    c_sts->add_option("--manifest-b", sts.manifest_b, "Take the second group from another dataset");
    c_sts->add_option("--pair", sts.pair, "States to compare, e.g. basal:severe")->capture_default_str();
    c_sts->add_option("--wavelet", sts.wavelet)->capture_default_str();
    c_sts->add_option("--depth", sts.depth)->capture_default_str();
    c_sts->add_option("--cr", sts.cr)->capture_default_str();
    c_sts->add_option("--alpha", sts.alpha)->capture_default_str();
    c_sts->add_option("--seed", sts.seed, "Normality-test Monte Carlo seed")->capture_default_str();
    c_sts->add_option("--csv", sts.csv, "CSV path");
    c_sts->add_option("--table", sts.table, "Aligned table path (default stdout)");

    SweepArgs swp;
    auto* c_swp = app.add_subcommand("sweep", "Detection rate against compression ratio");
    c_swp->add_option("--manifest", swp.manifest)->capture_default_str();
    c_swp->add_option("--wavelet", swp.wavelet)->capture_default_str();
    c_swp->add_option("--depth", swp.depth)->capture_default_str();
    c_swp->add_option("--crs", swp.crs, "Comma-separated ratios")->delimiter(',')->capture_default_str();
    c_swp->add_option("--alpha", swp.alpha)->capture_default_str();
    c_swp->add_option("--out", swp.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "eggprd: " << e.what() << " (run with --help for usage)\n";
        return kExitUsage;
    }

    try {
        if (c_sim->parsed()) return do_simulate(sim, out);
        if (c_cmp->parsed()) return do_compress(cmp, threads, out);
        if (c_srf->parsed()) return do_surface(srf, threads, out);
        if (c_mat->parsed()) return do_match(mat, threads, out);
        if (c_sts->parsed()) return do_stats(sts, threads, out);
        if (c_swp->parsed()) return do_sweep(swp, threads, out);
    } catch (const UsageError& e) {
        err << "eggprd: " << e.what() << " (run with --help for usage)\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "eggprd: error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    std::vector<const char*> ptrs;
    ptrs.reserve(argv.size());
    for (const auto& s : argv) ptrs.push_back(s.c_str());
    return run(static_cast<int>(ptrs.size()), ptrs.data(), out, err);
}

} // namespace eggprd::cli
