#include "eggprd/simulate.hpp"

#include "eggprd/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace eggprd {

namespace {

// Calibration constants of the generator-splitting model.
constexpr double kBasalFreqLo = 4.6, kBasalFreqHi = 5.4;       // cpm
constexpr double kAmplitudeLo = 0.8, kAmplitudeHi = 1.2;
constexpr double kChannelGainLo = 0.6, kChannelGainHi = 1.4;
constexpr double kMildPowerLo = 0.92, kMildPowerHi = 1.0;      // fraction of basal power
constexpr double kSevereShrinkLo = 0.70, kSevereShrinkHi = 0.95; // fraction of mild power
constexpr double kMixLo = 0.8, kMixHi = 1.0;
constexpr double kSecondPhase = 0.7, kThirdPhase = 1.9;

enum class Stream : std::uint64_t { subject = 1, state = 2, mixing = 3, noise = 4, square = 5 };

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, Stream kind, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    std::uint64_t h = splitmix(seed);
    for (std::uint64_t v : {static_cast<std::uint64_t>(kind), a, b, c}) h = splitmix(h ^ v);
    return std::mt19937_64(h);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct SubjectTraits {
    double frequency_cpm;
    double amplitude;
    double phase;
    std::vector<double> channel_gain;
    double mild_power;
    double severe_power;
};

SubjectTraits subject_traits(const CohortSpec& spec, int subject) {
    auto rng = stream(spec.seed, Stream::subject, static_cast<std::uint64_t>(subject));
    SubjectTraits t;
    t.frequency_cpm = uniform(rng, kBasalFreqLo, kBasalFreqHi);
    t.amplitude = uniform(rng, kAmplitudeLo, kAmplitudeHi);
    t.phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    t.channel_gain.resize(static_cast<std::size_t>(spec.channels));
    for (auto& g : t.channel_gain) g = uniform(rng, kChannelGainLo, kChannelGainHi);
    t.mild_power = uniform(rng, kMildPowerLo, kMildPowerHi);
    t.severe_power = t.mild_power * uniform(rng, kSevereShrinkLo, kSevereShrinkHi);
    return t;
}

std::uint64_t state_tag(State s) { return static_cast<std::uint64_t>(s) + 1; }

double harmonic_wave(double phase) {
    return std::sin(phase) + kSecondHarmonic * std::sin(2.0 * phase + kSecondPhase) +
           kThirdHarmonic * std::sin(3.0 * phase + kThirdPhase);
}

} // namespace

void CohortSpec::validate() const {
    if (subjects < 1) throw std::invalid_argument("cohort needs at least one subject");
    if (channels < 1) throw std::invalid_argument("cohort needs at least one channel");
    if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0)) {
        throw std::invalid_argument("duration and sample rate must be positive");
    }
    const double n = duration_s * sample_rate_hz;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
        throw std::invalid_argument("duration x sample rate must be a whole number of samples");
    }
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise level must be non-negative");
}

std::size_t CohortSpec::sample_count() const {
    return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

void StateModel::validate() const {
    const std::size_t expected = state == State::basal ? 1 : state == State::mild ? 2 : 3;
    if (generators.size() != expected) {
        throw std::invalid_argument(to_string(state) + " model needs " + std::to_string(expected) + " generator(s)");
    }
    double power = 0.0;
    for (const auto& g : generators) {
        if (!(g.frequency_cpm > 0.0) || !(g.amplitude >= 0.0)) {
            throw std::invalid_argument("generator frequency and amplitude must be positive");
        }
        power += 0.5 * g.amplitude * g.amplitude;
    }
    if (power > basal_power * (1.0 + 1e-12)) {
        throw std::invalid_argument("split generators exceed the basal power");
    }
    if (mixing.empty()) throw std::invalid_argument("model has no channels");
    for (const auto& row : mixing) {
        if (row.size() != generators.size()) throw std::invalid_argument("mixing row size mismatch");
    }
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise level must be non-negative");
}

StateModel make_state_model(const CohortSpec& spec, State state, int subject) {
    spec.validate();
    const auto traits = subject_traits(spec, subject);
    auto rng = stream(spec.seed, Stream::state, static_cast<std::uint64_t>(subject), state_tag(state));

    StateModel m;
    m.state = state;
    m.noise_sd = spec.noise_sd;
    m.basal_power = 0.5 * traits.amplitude * traits.amplitude;

    double power_fraction = 1.0;
    std::vector<double> share;
    switch (state) {
    case State::basal:
        m.generators.push_back({traits.frequency_cpm, traits.amplitude, traits.phase});
        share = {1.0};
        break;
    case State::mild: {
        power_fraction = traits.mild_power;
        const double u = uniform(rng, 0.4, 0.6);
        share = {u, 1.0 - u};
        m.generators.push_back({uniform(rng, 3.6, 4.4), 0.0, uniform(rng, 0.0, 2.0 * std::numbers::pi)});
        m.generators.push_back({uniform(rng, 5.8, 6.8), 0.0, uniform(rng, 0.0, 2.0 * std::numbers::pi)});
        break;
    }
    case State::severe: {
        power_fraction = traits.severe_power;
        const double u1 = uniform(rng, 0.28, 0.38), u2 = uniform(rng, 0.28, 0.38);
        share = {u1, u2, 1.0 - u1 - u2};
        m.generators.push_back({uniform(rng, 3.2, 3.8), 0.0, uniform(rng, 0.0, 2.0 * std::numbers::pi)});
        m.generators.push_back({uniform(rng, 4.8, 5.6), 0.0, uniform(rng, 0.0, 2.0 * std::numbers::pi)});
        m.generators.push_back({uniform(rng, 6.6, 7.6), 0.0, uniform(rng, 0.0, 2.0 * std::numbers::pi)});
        break;
    }
    }
    for (std::size_t g = 0; g < m.generators.size(); ++g) {
        m.generators[g].amplitude = traits.amplitude * std::sqrt(power_fraction * share[g]);
    }

    // Per channel: raw weights in [kMixLo, kMixHi], rescaled so the channel's
    // generator power is exactly gain^2 * power_fraction * basal power.
    auto mix_rng = stream(spec.seed, Stream::mixing, static_cast<std::uint64_t>(subject), state_tag(state));
    m.mixing.resize(static_cast<std::size_t>(spec.channels));
    for (std::size_t ch = 0; ch < m.mixing.size(); ++ch) {
        auto& row = m.mixing[ch];
        row.resize(m.generators.size());
        double mixed = 0.0, target = 0.0;
        for (std::size_t g = 0; g < row.size(); ++g) {
            row[g] = state == State::basal ? 1.0 : uniform(mix_rng, kMixLo, kMixHi);
            mixed += row[g] * row[g] * m.generators[g].amplitude * m.generators[g].amplitude;
            target += m.generators[g].amplitude * m.generators[g].amplitude;
        }
        const double scale = traits.channel_gain[ch] * std::sqrt(target / mixed);
        for (auto& w : row) w *= scale;
    }
    m.validate();
    return m;
}

Recording simulate_recording(const CohortSpec& spec, const StateModel& model, int subject) {
    spec.validate();
    model.validate();
    if (model.mixing.size() != static_cast<std::size_t>(spec.channels)) {
        throw std::invalid_argument("model channel count does not match the cohort spec");
    }
    const std::size_t n = spec.sample_count();
    Recording r;
    r.subject = subject;
    r.state = model.state;
    r.sample_rate_hz = spec.sample_rate_hz;
    r.channels.assign(static_cast<std::size_t>(spec.channels), std::vector<double>(n, 0.0));

    std::vector<std::vector<double>> waves(model.generators.size(), std::vector<double>(n));
    for (std::size_t g = 0; g < waves.size(); ++g) {
        const auto& gen = model.generators[g];
        const double omega = 2.0 * std::numbers::pi * gen.frequency_cpm / 60.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / spec.sample_rate_hz;
            waves[g][i] = gen.amplitude * harmonic_wave(omega * t + gen.phase);
        }
    }
    for (std::size_t ch = 0; ch < r.channels.size(); ++ch) {
        r.channel_ids.push_back(spec.first_channel_id + static_cast<int>(ch));
        auto rng = stream(spec.seed, Stream::noise, static_cast<std::uint64_t>(subject), state_tag(model.state), ch);
        std::normal_distribution<double> noise(0.0, 1.0);
        auto& out = r.channels[ch];
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t g = 0; g < waves.size(); ++g) v += model.mixing[ch][g] * waves[g][i];
            const double e = noise(rng);
            out[i] = v + model.noise_sd * e;
        }
    }
    return r;
}

Recording simulate_recording(const CohortSpec& spec, State state, int subject) {
    return simulate_recording(spec, make_state_model(spec, state, subject), subject);
}

Cohort simulate_cohort(const CohortSpec& spec) {
    spec.validate();
    constexpr State kStates[] = {State::basal, State::mild, State::severe};
    Cohort c;
    c.seed = spec.seed;
    c.recordings.resize(static_cast<std::size_t>(spec.subjects) * 3);
    parallel_for(c.recordings.size(), [&](std::size_t k) {
        const int subject = static_cast<int>(k / 3) + 1;
        c.recordings[k] = simulate_recording(spec, kStates[k % 3], subject);
    });
    return c;
}

std::filesystem::path simulate_cohort(const CohortSpec& spec, const std::filesystem::path& dir) {
    return write_cohort(dir, simulate_cohort(spec));
}

Signal square_wave(std::size_t n, std::size_t block, std::uint64_t seed, double sample_period_s) {
    if (n == 0 || block == 0) throw std::invalid_argument("square wave needs positive length and block");
    auto rng = stream(seed, Stream::square);
    std::bernoulli_distribution coin(0.5);
    Signal s{std::vector<double>(n), sample_period_s};
    double level = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % block == 0) level = coin(rng) ? 1.0 : -1.0;
        s.samples[i] = level;
    }
    return s;
}

} // namespace eggprd
