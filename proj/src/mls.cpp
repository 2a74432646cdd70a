#include "sonavol/mls.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace sonavol::mls {

namespace {

// Maximal-length feedback taps, one primitive polynomial per order.
const std::array<TapSet, kMaxOrder + 1> kTapTable = {{
    {},
    {},
    {2, 1},
    {3, 2},
    {4, 3},
    {5, 3},
    {6, 5},
    {7, 6},
    {8, 6, 5, 4},
    {9, 5},
    {10, 7},
    {11, 9},
    {12, 6, 4, 1},
    {13, 4, 3, 1},
    {14, 5, 3, 1},
    {15, 14},
    {16, 15, 13, 4},
    {17, 14},
    {18, 11},
    {19, 6, 2, 1},
    {20, 17},
    {21, 19},
    {22, 21},
    {23, 18},
    {24, 23, 22, 17},
}};

void check_order(int order) {
    if (order < kMinOrder || order > kMaxOrder) {
        throw std::invalid_argument("MLS order " + std::to_string(order) + " outside [" +
                                    std::to_string(kMinOrder) + ", " + std::to_string(kMaxOrder) + "]");
    }
}

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (p == nullptr) {
        throw std::bad_alloc();
    }
    return std::unique_ptr<T[], FftwFree>(p);
}

class Plan {
public:
    explicit Plan(fftw_plan plan) : plan_(plan) {
        if (plan_ == nullptr) {
            throw std::runtime_error("FFTW failed to create a plan");
        }
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

} // namespace

std::vector<std::uint8_t> MlsSequence::bits() const {
    std::vector<std::uint8_t> out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(),
                   [](double s) { return static_cast<std::uint8_t>(s > 0.0 ? 1 : 0); });
    return out;
}

const TapSet& default_taps(int order) {
    check_order(order);
    return kTapTable[static_cast<std::size_t>(order)];
}

MlsSequence generate_mls(int order, std::optional<TapSet> taps, std::optional<RegisterState> seed) {
    check_order(order);

    TapSet tap_set = taps ? std::move(*taps) : default_taps(order);
    if (tap_set.empty()) {
        throw std::invalid_argument("MLS tap set is empty");
    }
    std::uint32_t tap_mask = 0;
    for (int t : tap_set) {
        if (t < 1 || t > order) {
            throw std::invalid_argument("MLS tap " + std::to_string(t) + " outside register of order " +
                                        std::to_string(order));
        }
        tap_mask |= 1u << (t - 1);
    }

    RegisterState initial = seed ? std::move(*seed) : RegisterState(static_cast<std::size_t>(order), 1);
    if (initial.size() != static_cast<std::size_t>(order)) {
        throw std::invalid_argument("MLS seed must have one bit per register stage");
    }
    std::uint32_t start = 0;
    for (std::size_t i = 0; i < initial.size(); ++i) {
        if (initial[i] > 1) {
            throw std::invalid_argument("MLS seed entries must be 0 or 1");
        }
        start |= static_cast<std::uint32_t>(initial[i]) << i;
    }
    if (start == 0) {
        throw std::invalid_argument("MLS seed must be nonzero");
    }

    // Bit k-1 of `state` holds stage k. Output is the last stage; the XOR
    // of tapped stages enters stage 1.
    const std::uint32_t state_mask = (1u << order) - 1u;
    const std::size_t period = (std::size_t{1} << order) - 1;
    std::vector<double> samples(period);
    std::uint32_t state = start;
    for (std::size_t k = 0; k < period; ++k) {
        samples[k] = ((state >> (order - 1)) & 1u) ? 1.0 : -1.0;
        const std::uint32_t feedback = static_cast<std::uint32_t>(std::popcount(state & tap_mask) & 1);
        state = ((state << 1) | feedback) & state_mask;
        if (state == start && k + 1 < period) {
            throw std::invalid_argument("MLS taps are not primitive: period " + std::to_string(k + 1) +
                                        " < " + std::to_string(period));
        }
    }
    if (state != start) {
        throw std::invalid_argument("MLS taps are not primitive: register does not return to its seed");
    }

    return MlsSequence(order, std::move(tap_set), std::move(initial), std::move(samples));
}

CorrelationSeries CorrelationSeries::unit_peak() const {
    CorrelationSeries out = *this;
    double peak = 0.0;
    for (double v : values) {
        peak = std::max(peak, std::abs(v));
    }
    if (peak > 0.0) {
        for (double& v : out.values) {
            v /= peak;
        }
    }
    out.normalization = Normalization::UnitPeak;
    return out;
}

CorrelationSeries circular_autocorrelation(std::span<const double> seq) {
    if (seq.empty()) {
        throw std::invalid_argument("autocorrelation of an empty sequence");
    }
    for (double s : seq) {
        if (s != 1.0 && s != -1.0) {
            throw std::invalid_argument("circular_autocorrelation expects a +1/-1 sequence");
        }
    }
    // Products of +-1 are exact, so the direct sum carries no rounding error.
    const std::size_t n = seq.size();
    CorrelationSeries out;
    out.values.resize(n);
    out.normalization = Normalization::UnitPeak;
    for (std::size_t lag = 0; lag < n; ++lag) {
        double acc = 0.0;
        std::size_t j = lag;
        for (std::size_t k = 0; k < n; ++k) {
            acc += seq[k] * seq[j];
            if (++j == n) {
                j = 0;
            }
        }
        out.values[lag] = acc / static_cast<double>(n);
    }
    return out;
}

CorrelationSeries cross_correlate(std::span<const double> recorded, std::span<const double> reference) {
    if (reference.empty()) {
        throw std::invalid_argument("cross_correlate: empty reference");
    }
    if (recorded.size() < reference.size()) {
        throw std::invalid_argument("cross_correlate: recorded signal (" + std::to_string(recorded.size()) +
                                    " samples) shorter than reference (" + std::to_string(reference.size()) + ")");
    }

    // Circular correlation of length n never wraps for lags 0..N-M when n >= N.
    const std::size_t n = std::bit_ceil(recorded.size());
    const std::size_t bins = n / 2 + 1;
    auto rec = fftw_buffer<double>(n);
    auto ref = fftw_buffer<double>(n);
    auto rec_spec = fftw_buffer<fftw_complex>(bins);
    auto ref_spec = fftw_buffer<fftw_complex>(bins);

    std::unique_ptr<Plan> fwd_rec, fwd_ref, inverse;
    {
        std::lock_guard lock(planner_mutex());
        const int len = static_cast<int>(n);
        fwd_rec = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(len, rec.get(), rec_spec.get(), FFTW_ESTIMATE));
        fwd_ref = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(len, ref.get(), ref_spec.get(), FFTW_ESTIMATE));
        inverse = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(len, rec_spec.get(), rec.get(), FFTW_ESTIMATE));
    }

    std::fill(rec.get(), rec.get() + n, 0.0);
    std::fill(ref.get(), ref.get() + n, 0.0);
    std::copy(recorded.begin(), recorded.end(), rec.get());
    std::copy(reference.begin(), reference.end(), ref.get());
    fwd_rec->execute();
    fwd_ref->execute();

    // R[k] * conj(S[k]) is the spectrum of the correlation.
    for (std::size_t k = 0; k < bins; ++k) {
        const double a = rec_spec[k][0], b = rec_spec[k][1];
        const double c = ref_spec[k][0], d = ref_spec[k][1];
        rec_spec[k][0] = a * c + b * d;
        rec_spec[k][1] = b * c - a * d;
    }
    inverse->execute();

    CorrelationSeries out;
    const std::size_t lags = recorded.size() - reference.size() + 1;
    out.values.resize(lags);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t l = 0; l < lags; ++l) {
        out.values[l] = rec[l] * scale;
    }
    return out;
}

} // namespace sonavol::mls
