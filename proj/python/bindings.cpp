#include "eggprd/compression.hpp"
#include "eggprd/io.hpp"
#include "eggprd/matcher.hpp"
#include "eggprd/simulate.hpp"
#include "eggprd/stats.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace eggprd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
    return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

FilterPair filter(const std::string& spec) { return resolve(parse_wavelet_spec(spec)); }

py::dict outcome(const TestOutcome& t) {
    py::dict d;
    d["test"] = to_string(t.test);
    d["statistic"] = t.statistic;
    d["p_value"] = t.p_value;
    d["reject"] = t.rejects();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wavelet compression PRD, Pollen-plane matching and paired statistics";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    m.def("lowpass", [](const std::string& spec) {
        const auto f = filter(spec);
        return to_array({f.lowpass().begin(), f.lowpass().end()});
    }, py::arg("wavelet"), "Low-pass taps of a named wavelet or pollen:A,B / pollen-pi:A,B.");

    m.def("pollen_lowpass", [](double a, double b) {
        const auto f = pollen_filter(a, b);
        return to_array({f.lowpass().begin(), f.lowpass().end()});
    }, py::arg("a"), py::arg("b"));

    m.def("center_frequency", [](const std::string& spec) { return center_frequency(filter(spec)); },
          py::arg("wavelet"));

    m.def("select_scales", [](const std::string& spec, double sample_period_s, double target_hz) {
        return select_scales(filter(spec), sample_period_s, target_hz);
    }, py::arg("wavelet"), py::arg("sample_period_s") = 0.1, py::arg("target_hz") = kDefaultTargetHz);

    m.def("dwt", [](const Array& x, const std::string& spec, int depth) {
        const auto c = dwt_forward(to_vector(x), filter(spec), depth);
        py::list details;
        for (const auto& d : c.details) details.append(to_array(d));
        return py::make_tuple(to_array(c.approximation), details);
    }, py::arg("x"), py::arg("wavelet"), py::arg("depth"),
          "Returns (approximation, [d_1, ..., d_depth]).");

    m.def("idwt", [](const Array& approximation, const std::vector<Array>& details, const std::string& spec,
                     std::size_t length) {
        DwtCoefficients c;
        c.approximation = to_vector(approximation);
        for (const auto& d : details) c.details.push_back(to_vector(d));
        c.lengths.push_back(length);
        for (const auto& d : c.details) c.lengths.push_back(d.size());
        return to_array(dwt_inverse(c, filter(spec)).samples);
    }, py::arg("approximation"), py::arg("details"), py::arg("wavelet"), py::arg("length"));

    m.def("prd", [](const Array& x, const Array& y) { return prd(to_vector(x), to_vector(y)); },
          py::arg("reference"), py::arg("approximation"));

    m.def("compress", [](const Array& x, const std::string& spec, std::optional<int> depth, double cr,
                         double sample_period_s) {
        CompressionConfig cfg;
        cfg.wavelet = parse_wavelet_spec(spec);
        cfg.depth = depth;
        cfg.compression_ratio = cr;
        const auto r = compress(Signal{to_vector(x), sample_period_s}, cfg);
        py::dict d;
        d["reconstruction"] = to_array(r.reconstruction.samples);
        d["depth"] = r.depth;
        d["kept"] = r.kept;
        d["total"] = r.total_coefficients;
        d["prd_percent"] = r.prd_percent;
        return d;
    }, py::arg("x"), py::arg("wavelet") = "daubechies-3", py::arg("depth") = py::none(), py::arg("cr") = 3.0,
          py::arg("sample_period_s") = 0.1);

    m.def("prd_surface", [](const Array& x, int depth, double cr, std::size_t resolution, unsigned threads) {
        GridSpec g;
        g.resolution = resolution;
        const Signal s{to_vector(x), 0.1};
        PrdSurface surface;
        {
            py::gil_scoped_release release;
            surface = prd_surface(s, g, cr, depth, threads);
        }
        Array out({resolution, resolution});
        std::copy(surface.values.begin(), surface.values.end(), out.mutable_data());
        Array axis(static_cast<py::ssize_t>(resolution));
        for (std::size_t i = 0; i < resolution; ++i) axis.mutable_data()[i] = g.a(i);
        return py::make_tuple(axis, axis, out);
    }, py::arg("x"), py::arg("depth"), py::arg("cr") = 3.0, py::arg("resolution") = 64, py::arg("threads") = 0,
          "Returns (a, b, prd) with prd[i, j] at (a[i], b[j]).");

    m.def("paired_t", [](const Array& d) { return outcome(paired_t(to_vector(d))); }, py::arg("diffs"));
    m.def("wilcoxon", [](const Array& d) { return outcome(wilcoxon_signed_rank(to_vector(d))); }, py::arg("diffs"));
    m.def("lilliefors", [](const Array& x, double alpha) { return outcome(lilliefors(to_vector(x), alpha)); },
          py::arg("x"), py::arg("alpha") = kDefaultAlpha);

    m.def("compare_paired", [](const Array& a, const Array& b, int channel, double alpha) {
        const auto r = compare_paired(to_vector(a), to_vector(b), channel, alpha);
        py::dict d;
        d["channel"] = r.channel;
        d["test"] = to_string(r.routed);
        d["mean"] = r.mean;
        d["sd"] = r.sd;
        d["p_value"] = r.p_value;
        d["significant"] = r.significant;
        return d;
    }, py::arg("a"), py::arg("b"), py::arg("channel") = 0, py::arg("alpha") = kDefaultAlpha);

    m.def("square_wave", [](std::size_t n, std::size_t block, std::uint64_t seed) {
        return to_array(square_wave(n, block, seed).samples);
    }, py::arg("n"), py::arg("block") = 8, py::arg("seed") = 1);

    m.def("simulate", [](const std::filesystem::path& dir, int subjects, int channels, double duration_s,
                         std::uint64_t seed) {
        CohortSpec spec;
        spec.subjects = subjects;
        spec.channels = channels;
        spec.duration_s = duration_s;
        spec.seed = seed;
        return simulate_cohort(spec, dir);
    }, py::arg("out"), py::arg("subjects") = 16, py::arg("channels") = 8, py::arg("duration_s") = 600.0,
          py::arg("seed") = 7, "Writes a synthetic cohort and returns the manifest path.");

    m.def("read_recording", [](const std::filesystem::path& path) {
        const auto r = read_recording(path);
        py::dict d;
        d["subject"] = r.subject;
        d["state"] = to_string(r.state);
        d["sample_rate_hz"] = r.sample_rate_hz;
        d["channel_ids"] = r.channel_ids;
        Array data({r.channels.size(), r.sample_count()});
        for (std::size_t c = 0; c < r.channels.size(); ++c) {
            std::copy(r.channels[c].begin(), r.channels[c].end(), data.mutable_data() + c * r.sample_count());
        }
        d["channels"] = data;
        return d;
    }, py::arg("path"));
}
