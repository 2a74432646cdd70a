#pragma once

#include "sonavol/trace.hpp"

#include <filesystem>
#include <iosfwd>

namespace sonavol::wav {

// Mono 16-bit PCM only. Full scale is 32767, so +-1 amplitudes survive a
// write/read cycle exactly.

enum class Scaling {
    Clip,          // write samples as-is, clipping outside [-1, 1]
    NormalizePeak, // rescale so the largest magnitude becomes kNormalizedPeak
};

inline constexpr double kNormalizedPeak = 0.9;

void write(std::ostream& out, const EchoTrace& trace, Scaling scaling = Scaling::Clip);
void write(const std::filesystem::path& path, const EchoTrace& trace, Scaling scaling = Scaling::Clip);

/// Throws std::runtime_error on malformed headers and on anything other
/// than mono 16-bit PCM.
EchoTrace read(std::istream& in, TraceRole role = TraceRole::Recorded);
EchoTrace read(const std::filesystem::path& path, TraceRole role = TraceRole::Recorded);

} // namespace sonavol::wav
