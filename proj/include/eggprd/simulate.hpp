#ifndef EGGPRD_SIMULATE_HPP
#define EGGPRD_SIMULATE_HPP

#include "eggprd/io.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace eggprd {

/// Fixed absolute noise level of the synthetic channels (arbitrary units).
inline constexpr double kSimNoiseSd = 0.25;

struct CohortSpec {
    int subjects = 16;
    int channels = 8;
    double duration_s = 600.0;
    double sample_rate_hz = 10.0;
    std::uint64_t seed = 7;
    double noise_sd = kSimNoiseSd;
    int first_channel_id = 7;

    void validate() const;
    std::size_t sample_count() const;
};

/// One gastric oscillator: fundamental plus fixed 2nd/3rd harmonics.
struct Generator {
    double frequency_cpm = 5.0;
    double amplitude = 1.0; ///< of the fundamental
    double phase = 0.0;
};

/// Generator layout of one subject in one state. mixing[ch][g] weights
/// generator g in channel ch.
struct StateModel {
    State state = State::basal;
    std::vector<Generator> generators;
    std::vector<std::vector<double>> mixing;
    double noise_sd = kSimNoiseSd;
    /// Fundamental power of the subject's basal generator; split states must not exceed it.
    double basal_power = 0.5;

    void validate() const;
};

/// Relative amplitudes of the 2nd and 3rd harmonics.
inline constexpr double kSecondHarmonic = 0.3;
inline constexpr double kThirdHarmonic = 0.12;

/// Deterministic model for (spec.seed, subject, state). Subject-level traits
/// (basal frequency, amplitude, channel gains) are shared by all states.
StateModel make_state_model(const CohortSpec& spec, State state, int subject);

/// Channels sum their weighted generators plus white Gaussian noise seeded
/// from (seed, subject, state, channel).
Recording simulate_recording(const CohortSpec& spec, const StateModel& model, int subject);
Recording simulate_recording(const CohortSpec& spec, State state, int subject);

/// Subjects 1..spec.subjects, each in basal, mild and severe.
Cohort simulate_cohort(const CohortSpec& spec);
/// Same cohort written to `dir`; returns the manifest path.
std::filesystem::path simulate_cohort(const CohortSpec& spec, const std::filesystem::path& dir);

/// Blocks of `block` samples, each +1 or -1 with equal probability.
Signal square_wave(std::size_t n, std::size_t block, std::uint64_t seed, double sample_period_s = 0.1);

} // namespace eggprd

#endif
