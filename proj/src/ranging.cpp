#include "sonavol/ranging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sonavol {

const char* to_string(RangingError::Kind kind) noexcept {
    switch (kind) {
    case RangingError::Kind::NoDirectPeak: return "no_direct_peak";
    case RangingError::Kind::NoEchoCandidate: return "no_echo_candidate";
    case RangingError::Kind::ImpossibleGeometry: return "impossible_geometry";
    case RangingError::Kind::AttemptsExhausted: return "attempts_exhausted";
    }
    return "unknown";
}

void RangingConfig::validate() const {
    if (!(speed_of_sound > 0.0)) {
        throw std::invalid_argument("speed of sound must be positive");
    }
    if (!(speaker_mic_distance >= 0.0)) {
        throw std::invalid_argument("speaker-microphone distance must be non-negative");
    }
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("sample rate must be positive");
    }
    if (!(peak_threshold_ratio > 0.0 && peak_threshold_ratio <= 1.0)) {
        throw std::invalid_argument("peak threshold ratio must lie in (0, 1]");
    }
    if (!(min_peak_separation >= 0.0) || !(min_peak_prominence >= 0.0)) {
        throw std::invalid_argument("peak separation and prominence must be non-negative");
    }
    if (!(height_min < height_max)) {
        throw std::invalid_argument("plausible height range is empty");
    }
    if (!(retry_interval >= 0.0)) {
        throw std::invalid_argument("retry interval must be non-negative");
    }
    if (max_attempts < 1) {
        throw std::invalid_argument("max_attempts must be at least 1");
    }
}

namespace ranging {

namespace {

double robust_sigma(std::vector<double> values) {
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double median = *mid;
    for (double& v : values) {
        v = std::abs(v - median);
    }
    std::nth_element(values.begin(), mid, values.end());
    return 1.4826 * *mid;
}

Peak make_peak(const std::vector<double>& v, std::size_t i, const RangingConfig& config) {
    double pos = static_cast<double>(i);
    if (config.parabolic_interpolation && i > 0 && i + 1 < v.size()) {
        pos += parabolic_offset(v[i - 1], v[i], v[i + 1]);
    }
    return Peak{pos / config.sample_rate, v[i], i};
}

bool plausible(double height, const RangingConfig& config) {
    return height >= config.height_min && height <= config.height_max;
}

} // namespace

double height_from_gap(double echo_gap_s, const RangingConfig& config) {
    const double v = config.speed_of_sound;
    const double d = config.speaker_mic_distance;
    const double path = v * echo_gap_s + d;
    const double radicand = path * path - d * d;
    if (radicand < 0.0) {
        throw RangingError(RangingError::Kind::ImpossibleGeometry,
                           "echo gap " + std::to_string(echo_gap_s) + " s implies negative radicand");
    }
    return std::sqrt(radicand) / 2.0;
}

double parabolic_offset(double left, double centre, double right) {
    const double denom = left - 2.0 * centre + right;
    if (denom >= 0.0) {
        return 0.0; // not a strict maximum
    }
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

PeakSet detect_peaks(const mls::CorrelationSeries& corr, const RangingConfig& config) {
    config.validate();
    const std::vector<double>& v = corr.values;
    if (v.empty()) {
        throw std::invalid_argument("detect_peaks: empty correlation");
    }

    const auto direct_it = std::max_element(v.begin(), v.end());
    const auto direct = static_cast<std::size_t>(direct_it - v.begin());
    const double top = *direct_it;
    const double sigma = robust_sigma(v);
    if (!(top > 0.0) || top < config.min_peak_prominence * sigma) {
        throw RangingError(RangingError::Kind::NoDirectPeak, "direct peak does not rise above the noise floor");
    }

    const double min_sep = config.min_peak_separation * config.sample_rate;
    const double floor_value = config.peak_threshold_ratio * top;
    std::vector<std::size_t> candidates;
    for (std::size_t i = direct + 1; i < v.size(); ++i) {
        const bool rising = v[i] > v[i - 1];
        const bool falling = i + 1 == v.size() || v[i] >= v[i + 1];
        if (rising && falling && v[i] >= floor_value && static_cast<double>(i - direct) >= min_sep) {
            candidates.push_back(i);
        }
    }
    // Strongest first; drop anything too close to a stronger kept peak.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    std::vector<std::size_t> kept;
    for (std::size_t c : candidates) {
        const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return std::abs(static_cast<double>(c) - static_cast<double>(k)) >= min_sep;
        });
        if (clear) {
            kept.push_back(c);
        }
    }

    PeakSet set;
    set.peaks.push_back(make_peak(v, direct, config));
    for (std::size_t k : kept) {
        set.peaks.push_back(make_peak(v, k, config));
    }
    std::sort(set.peaks.begin(), set.peaks.end(), [](const Peak& a, const Peak& b) { return a.lag < b.lag; });
    for (std::size_t i = 0; i < set.peaks.size(); ++i) {
        if (set.peaks[i].lag == direct) {
            set.direct_index = i;
        }
    }

    const double t0 = set.direct().time_s;
    std::optional<std::size_t> echo;
    for (std::size_t i = set.direct_index + 1; i < set.peaks.size(); ++i) {
        const Peak& p = set.peaks[i];
        if (p.time_s <= t0) {
            continue;
        }
        double h = 0.0;
        try {
            h = height_from_gap(p.time_s - t0, config);
        } catch (const RangingError&) {
            continue;
        }
        if (plausible(h, config) && (!echo || p.value > set.peaks[*echo].value)) {
            echo = i;
        }
    }
    if (!echo) {
        throw RangingError(RangingError::Kind::NoEchoCandidate, "no echo implies a plausible height");
    }
    set.echo_index = *echo;
    return set;
}

RangeEstimate estimate_height(const PeakSet& peaks, const RangingConfig& config) {
    config.validate();
    if (peaks.direct_index >= peaks.peaks.size() || peaks.echo_index >= peaks.peaks.size()) {
        throw std::invalid_argument("estimate_height: peak indices out of range");
    }
    const double gap = peaks.echo().time_s - peaks.direct().time_s;
    RangeEstimate est;
    est.height_m = height_from_gap(gap, config);
    est.round_trip_path_m = config.speed_of_sound * gap + config.speaker_mic_distance;
    return est;
}

RangeEstimate range_once(const EchoTrace& recorded, std::span<const double> reference, const RangingConfig& config) {
    recorded.validate();
    const auto corr = mls::cross_correlate(recorded.samples, reference);
    return estimate_height(detect_peaks(corr, config), config);
}

RangeEstimate range_with_retry(const TraceSource& source, std::span<const double> reference,
                               const RangingConfig& config) {
    config.validate();
    std::string last_failure;
    for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
        try {
            RangeEstimate est = range_once(source(attempt), reference, config);
            if (!plausible(est.height_m, config)) {
                last_failure = "height " + std::to_string(est.height_m) + " m outside plausible range";
                continue;
            }
            est.attempts_used = attempt;
            est.elapsed_retry_s = static_cast<double>(attempt - 1) * config.retry_interval;
            return est;
        } catch (const RangingError& e) {
            last_failure = e.what();
        }
    }
    throw RangingError(RangingError::Kind::AttemptsExhausted,
                       "no plausible height after " + std::to_string(config.max_attempts) +
                           " attempts (last: " + last_failure + ")");
}

int window_count(const EchoTrace& recording, const RangingConfig& config) {
    const auto window = static_cast<std::size_t>(std::llround(config.retry_interval * recording.sample_rate));
    if (window == 0 || recording.size() < 2 * window) {
        return 1;
    }
    return static_cast<int>(recording.size() / window);
}

TraceSource windowed_source(const EchoTrace& recording, const RangingConfig& config) {
    const int count = window_count(recording, config);
    const auto window = static_cast<std::size_t>(std::llround(config.retry_interval * recording.sample_rate));
    return [recording, count, window](int attempt) -> EchoTrace {
        if (attempt < 1 || attempt > count) {
            throw RangingError(RangingError::Kind::AttemptsExhausted,
                               "recording holds only " + std::to_string(count) + " probe windows");
        }
        if (count == 1) {
            return recording;
        }
        EchoTrace part;
        part.sample_rate = recording.sample_rate;
        part.role = recording.role;
        const auto begin = recording.samples.begin() + static_cast<std::ptrdiff_t>((attempt - 1) * window);
        part.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(window));
        return part;
    };
}

RangeEstimate range_recording(const EchoTrace& recording, std::span<const double> reference,
                              const RangingConfig& config) {
    recording.validate();
    if (recording.sample_rate != config.sample_rate) {
        throw std::invalid_argument("recording sample rate " + std::to_string(recording.sample_rate) +
                                    " Hz differs from configured " + std::to_string(config.sample_rate) + " Hz");
    }
    RangingConfig capped = config;
    capped.max_attempts = std::min(config.max_attempts, window_count(recording, config));
    return range_with_retry(windowed_source(recording, capped), reference, capped);
}

} // namespace ranging
} // namespace sonavol
