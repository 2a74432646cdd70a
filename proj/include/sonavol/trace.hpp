#pragma once

#include <cstddef>
#include <vector>

namespace sonavol {

enum class TraceRole { Reference, Recorded };

/// A sampled mono waveform. As a reference it is the emitted probe signal,
/// as a recording it is what the microphone captured.
struct EchoTrace {
    std::vector<double> samples;
    double sample_rate = 48000.0;
    TraceRole role = TraceRole::Recorded;

    std::size_t size() const noexcept { return samples.size(); }
    double duration() const noexcept { return static_cast<double>(samples.size()) / sample_rate; }

    /// Throws std::invalid_argument when the trace is empty or the rate is not positive.
    void validate() const;
};

} // namespace sonavol
