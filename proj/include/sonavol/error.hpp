#pragma once

#include <stdexcept>
#include <string>

namespace sonavol {

// Precondition violations are reported as std::invalid_argument. The types
// below carry failures that a caller is expected to react to.

class RangingError : public std::runtime_error {
public:
    enum class Kind {
        NoDirectPeak,       // nothing rises above the correlation noise floor
        NoEchoCandidate,    // no echo implies a plausible height; retry
        ImpossibleGeometry, // negative radicand when solving for height
        AttemptsExhausted,
    };

    RangingError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

const char* to_string(RangingError::Kind kind) noexcept;

/// Error raised by the pipeline, tagged with the stage that failed.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace sonavol
