#pragma once

#include "sonavol/error.hpp"
#include "sonavol/mls.hpp"
#include "sonavol/ranging_config.hpp"
#include "sonavol/trace.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sonavol::ranging {

struct Peak {
    double time_s = 0.0; // lag time, refined when interpolation is enabled
    double value = 0.0;  // correlation value at the sample maximum
    std::size_t lag = 0; // integer sample lag of the maximum
};

/// Correlation peaks sorted by time. The direct arrival is the global
/// maximum; the desktop echo is one of the later peaks. Intermediate
/// reflections (e.g. the user's body) stay in `peaks` but do not enter the
/// height computation.
struct PeakSet {
    std::vector<Peak> peaks;
    std::size_t direct_index = 0;
    std::size_t echo_index = 0;

    const Peak& direct() const { return peaks.at(direct_index); }
    const Peak& echo() const { return peaks.at(echo_index); }
};

struct RangeEstimate {
    double height_m = 0.0;
    double round_trip_path_m = 0.0; // echo path length 2s
    int attempts_used = 1;
    double elapsed_retry_s = 0.0;
};

/// Height above the surface for an echo arriving `echo_gap_s` after the
/// direct sound: H = sqrt((v*gap + d)^2 - d^2) / 2.
/// Throws RangingError(ImpossibleGeometry) for a negative radicand.
double height_from_gap(double echo_gap_s, const RangingConfig& config);

/// Offset in (-0.5, 0.5) samples of the vertex of the parabola through three
/// samples centred on a local maximum.
double parabolic_offset(double left, double centre, double right);

/// Throws RangingError(NoDirectPeak) when the global maximum does not stand
/// out from the correlation noise floor, and RangingError(NoEchoCandidate)
/// when no later peak implies a height inside the plausible range.
PeakSet detect_peaks(const mls::CorrelationSeries& corr, const RangingConfig& config);

RangeEstimate estimate_height(const PeakSet& peaks, const RangingConfig& config);

/// Correlate, detect and solve for one recording.
RangeEstimate range_once(const EchoTrace& recorded, std::span<const double> reference, const RangingConfig& config);

/// Produces the recording for a given 1-based attempt number.
using TraceSource = std::function<EchoTrace(int attempt)>;

/// Repeats the probe every retry_interval until an attempt yields a
/// plausible height. Throws RangingError(AttemptsExhausted) after
/// max_attempts failures; other errors propagate.
RangeEstimate range_with_retry(const TraceSource& source, std::span<const double> reference,
                               const RangingConfig& config);

/// Splits a long recording into consecutive retry_interval windows, one per
/// attempt. A recording shorter than two windows is a single attempt.
TraceSource windowed_source(const EchoTrace& recording, const RangingConfig& config);

/// Number of attempts windowed_source would provide.
int window_count(const EchoTrace& recording, const RangingConfig& config);

/// range_with_retry over the probe windows of one recording, capped at the
/// number of windows it holds. The recording's sample rate must match the
/// configured rate.
RangeEstimate range_recording(const EchoTrace& recording, std::span<const double> reference,
                              const RangingConfig& config);

} // namespace sonavol::ranging
