#pragma once

#include "sonavol/ranging_config.hpp"
#include "sonavol/trace.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sonavol::channel {

struct Path {
    double delay_s = 0.0;
    double gain = 1.0;
};

enum class DelayMode {
    Integer,    // delays rounded to whole samples
    Fractional, // windowed-sinc interpolation
};

/// Multipath acoustic channel. paths[0] is the direct path and must have the
/// smallest delay.
struct Channel {
    std::vector<Path> paths;
    std::optional<double> noise_snr_db; // nullopt: noiseless
    double sample_rate = 48000.0;
    DelayMode delay_mode = DelayMode::Integer;

    void validate() const;
};

struct ScenarioOptions {
    double echo_gain = 0.5;       // desktop reflection relative to the direct path
    std::vector<Path> clutter;    // extra reflections, e.g. from the user's body
    std::optional<double> noise_snr_db;
    DelayMode delay_mode = DelayMode::Integer;
};

/// Half-width, in samples, of the fractional-delay interpolation kernel.
inline constexpr int kSincHalfWidth = 32;

/// Direct path delay d/v and desktop echo delay 2s/v with s = sqrt(H^2 + (d/2)^2).
Channel scenario_from_geometry(double height_m, const RangingConfig& config, const ScenarioOptions& options = {});

/// Sum of delayed, scaled copies of `reference` plus white Gaussian noise at
/// the channel's SNR. Signal power is measured over the noiseless output
/// before any padding to `min_length`. Deterministic for a given seed.
EchoTrace simulate_channel(std::span<const double> reference, const Channel& channel, std::uint64_t seed,
                           std::size_t min_length = 0);

/// Indicative SNR for named environments ("quiet", "restaurant", "cafeteria").
/// These are not calibrated against measured ambient levels.
std::optional<double> environment_snr_db(std::string_view environment);

} // namespace sonavol::channel
