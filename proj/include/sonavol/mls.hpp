#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sonavol::mls {

inline constexpr int kMinOrder = 2;
inline constexpr int kMaxOrder = 24;

/// Register stage indices (1-based) whose XOR feeds the Fibonacci shift
/// register, i.e. the exponents of the feedback polynomial.
using TapSet = std::vector<int>;

/// Initial register contents, stage 1 first. Must contain at least one 1.
using RegisterState = std::vector<std::uint8_t>;

/// One period of a maximum length sequence mapped to amplitudes
/// (bit 1 -> +1, bit 0 -> -1), together with the register that produced it.
class MlsSequence {
public:
    MlsSequence(int order, TapSet taps, RegisterState seed, std::vector<double> samples)
        : order_(order), taps_(std::move(taps)), seed_(std::move(seed)), samples_(std::move(samples)) {}

    int order() const noexcept { return order_; }
    const TapSet& taps() const noexcept { return taps_; }
    const RegisterState& seed() const noexcept { return seed_; }
    const std::vector<double>& samples() const noexcept { return samples_; }
    std::size_t length() const noexcept { return samples_.size(); }

    /// Raw register output bits (0/1) recovered from the amplitudes.
    std::vector<std::uint8_t> bits() const;

private:
    int order_;
    TapSet taps_;
    RegisterState seed_;
    std::vector<double> samples_;
};

/// Primitive feedback taps used when the caller does not supply any.
const TapSet& default_taps(int order);

/// Runs the shift register for one full period. Throws std::invalid_argument
/// for an order outside [2, 24], a zero or mis-sized seed, out-of-range taps,
/// or taps whose state cycle is shorter than 2^order - 1.
MlsSequence generate_mls(int order,
                         std::optional<TapSet> taps = std::nullopt,
                         std::optional<RegisterState> seed = std::nullopt);

enum class Normalization { Raw, UnitPeak };

struct CorrelationSeries {
    std::vector<double> values; // indexed by lag
    Normalization normalization = Normalization::Raw;

    std::size_t length() const noexcept { return values.size(); }
    /// Copy scaled so that the largest magnitude is 1. An all-zero series is returned unchanged.
    CorrelationSeries unit_peak() const;
};

/// values[l] = (1/L) * sum_k seq[k] * seq[(k + l) mod L]. Requires a
/// nonempty sequence of +1/-1 values.
CorrelationSeries circular_autocorrelation(std::span<const double> seq);

/// Linear cross-correlation over every full alignment of `reference` inside
/// `recorded`: values[l] = sum_k recorded[l + k] * reference[k] for
/// l = 0 .. recorded.size() - reference.size(). Computed with real FFTs.
CorrelationSeries cross_correlate(std::span<const double> recorded, std::span<const double> reference);

} // namespace sonavol::mls
