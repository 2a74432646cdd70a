#include "sonavol/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace sonavol::channel {

namespace {

double sinc(double x) {
    if (x == 0.0) {
        return 1.0;
    }
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Blackman window over (-kSincHalfWidth, kSincHalfWidth).
double window(double x) {
    const double half = static_cast<double>(kSincHalfWidth);
    if (std::abs(x) >= half) {
        return 0.0;
    }
    const double u = (x + half) / (2.0 * half);
    return 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * u) + 0.08 * std::cos(4.0 * std::numbers::pi * u);
}

} // namespace

void Channel::validate() const {
    if (paths.empty()) {
        throw std::invalid_argument("channel needs at least the direct path");
    }
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("channel sample rate must be positive");
    }
    for (const Path& p : paths) {
        if (!(p.delay_s >= 0.0) || !std::isfinite(p.delay_s) || !std::isfinite(p.gain)) {
            throw std::invalid_argument("channel path delays must be finite and non-negative");
        }
        if (p.delay_s < paths.front().delay_s) {
            throw std::invalid_argument("the direct path must have the smallest delay");
        }
    }
    if (noise_snr_db && !std::isfinite(*noise_snr_db)) {
        throw std::invalid_argument("noise SNR must be finite");
    }
}

Channel scenario_from_geometry(double height_m, const RangingConfig& config, const ScenarioOptions& options) {
    config.validate();
    if (!(height_m > 0.0)) {
        throw std::invalid_argument("scenario height must be positive");
    }
    if (!(options.echo_gain < 1.0)) {
        throw std::invalid_argument("echo gain must be below the direct-path gain of 1");
    }
    const double v = config.speed_of_sound;
    const double d = config.speaker_mic_distance;
    const double s = std::sqrt(height_m * height_m + 0.25 * d * d);

    Channel ch;
    ch.sample_rate = config.sample_rate;
    ch.noise_snr_db = options.noise_snr_db;
    ch.delay_mode = options.delay_mode;
    ch.paths.push_back({d / v, 1.0});
    ch.paths.push_back({2.0 * s / v, options.echo_gain});
    ch.paths.insert(ch.paths.end(), options.clutter.begin(), options.clutter.end());
    ch.validate();
    return ch;
}

EchoTrace simulate_channel(std::span<const double> reference, const Channel& channel, std::uint64_t seed,
                           std::size_t min_length) {
    if (reference.empty()) {
        throw std::invalid_argument("simulate_channel: empty reference");
    }
    channel.validate();

    const double rate = channel.sample_rate;
    const bool fractional = channel.delay_mode == DelayMode::Fractional;
    double max_delay = 0.0;
    for (const Path& p : channel.paths) {
        max_delay = std::max(max_delay, p.delay_s * rate);
    }
    const std::size_t tail = fractional ? static_cast<std::size_t>(std::ceil(max_delay)) + kSincHalfWidth
                                        : static_cast<std::size_t>(std::llround(max_delay));
    const std::size_t signal_length = reference.size() + tail;

    EchoTrace out;
    out.sample_rate = rate;
    out.role = TraceRole::Recorded;
    out.samples.assign(std::max(signal_length, min_length), 0.0);

    for (const Path& p : channel.paths) {
        const double delay = p.delay_s * rate;
        if (!fractional) {
            const auto shift = static_cast<std::size_t>(std::llround(delay));
            for (std::size_t k = 0; k < reference.size(); ++k) {
                out.samples[k + shift] += p.gain * reference[k];
            }
            continue;
        }
        const double whole = std::floor(delay);
        const double frac = delay - whole;
        const auto base = static_cast<std::ptrdiff_t>(whole);
        std::vector<double> kernel;
        std::vector<std::ptrdiff_t> offsets;
        for (int j = -kSincHalfWidth + 1; j <= kSincHalfWidth; ++j) {
            const double x = static_cast<double>(j) - frac;
            const double h = sinc(x) * window(x);
            if (h != 0.0) {
                kernel.push_back(h);
                offsets.push_back(j);
            }
        }
        const auto length = static_cast<std::ptrdiff_t>(out.samples.size());
        for (std::size_t k = 0; k < reference.size(); ++k) {
            const double a = p.gain * reference[k];
            for (std::size_t t = 0; t < kernel.size(); ++t) {
                const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(k) + base + offsets[t];
                if (idx >= 0 && idx < length) {
                    out.samples[static_cast<std::size_t>(idx)] += a * kernel[t];
                }
            }
        }
    }

    if (channel.noise_snr_db) {
        double power = 0.0;
        for (std::size_t i = 0; i < signal_length; ++i) {
            power += out.samples[i] * out.samples[i];
        }
        power /= static_cast<double>(signal_length);
        const double sigma = std::sqrt(power / std::pow(10.0, *channel.noise_snr_db / 10.0));
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, sigma);
        for (double& s : out.samples) {
            s += noise(rng);
        }
    }
    return out;
}

std::optional<double> environment_snr_db(std::string_view environment) {
    if (environment == "quiet") {
        return 30.0;
    }
    if (environment == "restaurant") {
        return 10.0;
    }
    if (environment == "cafeteria") {
        return 0.0;
    }
    return std::nullopt;
}

} // namespace sonavol::channel
