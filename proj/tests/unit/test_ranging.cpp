#include "doctest.h"
#include "oracles.hpp"

#include "sonavol/channel_sim.hpp"
#include "sonavol/ranging.hpp"

#include <cmath>
#include <random>

using namespace sonavol;
using namespace sonavol::ranging;

namespace {

PeakSet exact_peaks(double t0, double t3) {
    PeakSet p;
    p.peaks = {{t0, 1.0, 0}, {t3, 0.5, 1}};
    p.direct_index = 0;
    p.echo_index = 1;
    return p;
}

} // namespace

TEST_CASE("zero echo gap gives zero height") {
    RangingConfig cfg;
    for (double d : {0.0, 0.05, 0.12, 0.3}) {
        cfg.speaker_mic_distance = d;
        CHECK(estimate_height(exact_peaks(0.01, 0.01), cfg).height_m == 0.0);
    }
}

TEST_CASE("collocated transducers reduce to v*gap/2") {
    RangingConfig cfg;
    cfg.speaker_mic_distance = 0.0;
    const auto est = estimate_height(exact_peaks(0.0, 2.0e-3), cfg);
    CHECK(est.height_m == doctest::Approx(343.0 * 2.0e-3 / 2.0).epsilon(1e-12));
    CHECK(est.round_trip_path_m == doctest::Approx(0.686).epsilon(1e-12));
}

TEST_CASE("gap from the 30 cm scenario inverts to 30 cm") {
    RangingConfig cfg;
    const auto est = estimate_height(exact_peaks(0.0, 1.43405e-3), cfg);
    CHECK(std::abs(est.height_m - 0.300) < 1e-4);
    CHECK(est.round_trip_path_m >= cfg.speaker_mic_distance);
}

TEST_CASE("negative radicand is impossible geometry") {
    RangingConfig cfg;
    try {
        estimate_height(exact_peaks(0.0, -0.5 * cfg.speaker_mic_distance / cfg.speed_of_sound), cfg);
        FAIL("expected RangingError");
    } catch (const RangingError& e) {
        CHECK(e.kind() == RangingError::Kind::ImpossibleGeometry);
    }
}

TEST_CASE("exact geometric delays invert to within 1e-9") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> hs(0.01, 2.0), ds(0.0, 0.2);
    RangingConfig cfg;
    for (int i = 0; i < 200; ++i) {
        const double h = hs(rng);
        cfg.speaker_mic_distance = ds(rng);
        const double gap = oracle::echo_gap(h, cfg.speaker_mic_distance, cfg.speed_of_sound);
        const auto est = estimate_height(exact_peaks(0.0, gap), cfg);
        CHECK(std::abs(est.height_m - h) / h < 1e-9);
    }
}

TEST_CASE("height is strictly increasing in the echo gap") {
    RangingConfig cfg;
    double prev = -1.0;
    for (int i = 0; i <= 500; ++i) {
        const double h = height_from_gap(i * 1e-5, cfg);
        CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("parabolic vertex of an exact parabola") {
    // y = 5 - (x - 0.3)^2 sampled at -1, 0, 1
    auto y = [](double x) { return 5.0 - (x - 0.3) * (x - 0.3); };
    CHECK(parabolic_offset(y(-1), y(0), y(1)) == doctest::Approx(0.3));
    CHECK(parabolic_offset(1.0, 2.0, 1.0) == 0.0);
    CHECK(parabolic_offset(1.0, 1.0, 1.0) == 0.0);
}

TEST_CASE("synthetic correlation with maxima at 100 and 169") {
    RangingConfig cfg;
    mls::CorrelationSeries corr;
    corr.values.assign(400, 0.0);
    corr.values[100] = 1.0;
    corr.values[169] = 0.5;
    const auto peaks = detect_peaks(corr, cfg);
    CHECK(peaks.direct().lag == 100);
    CHECK(peaks.echo().lag == 169);
    CHECK(peaks.echo().time_s - peaks.direct().time_s == doctest::Approx(69.0 / 48000.0).epsilon(1e-12));
    // sqrt((343 * 69/48000 + 0.12)^2 - 0.12^2) / 2
    CHECK(estimate_height(peaks, cfg).height_m == doctest::Approx(0.3006017418887697).epsilon(1e-12));
}

TEST_CASE("implausible echoes are discarded even when stronger") {
    RangingConfig cfg;
    const double far_gap = oracle::echo_gap(2.5, cfg.speaker_mic_distance, cfg.speed_of_sound);
    const auto far_lag = static_cast<std::size_t>(std::lround(100 + far_gap * cfg.sample_rate));
    mls::CorrelationSeries corr;
    corr.values.assign(far_lag + 50, 0.0);
    corr.values[100] = 1.0;
    corr.values[169] = 0.4;
    corr.values[far_lag] = 0.8;
    const auto peaks = detect_peaks(corr, cfg);
    CHECK(peaks.peaks.size() == 3);
    CHECK(peaks.echo().lag == 169);
    CHECK(peaks.peaks.back().lag == far_lag);
}

TEST_CASE("body reflections stay in the peak list") {
    RangingConfig cfg;
    mls::CorrelationSeries corr;
    corr.values.assign(400, 0.0);
    corr.values[100] = 1.0;
    corr.values[104] = 0.3; // implies < 5 cm
    corr.values[169] = 0.5;
    const auto peaks = detect_peaks(corr, cfg);
    CHECK(peaks.peaks.size() == 3);
    CHECK(peaks.direct_index == 0);
    CHECK(peaks.echo_index == 2);
}

TEST_CASE("identity channel has no echo") {
    RangingConfig cfg;
    const auto ref = mls::generate_mls(10).samples();
    const auto corr = mls::cross_correlate(ref, ref);
    try {
        detect_peaks(corr, cfg);
        FAIL("expected RangingError");
    } catch (const RangingError& e) {
        CHECK(e.kind() == RangingError::Kind::NoEchoCandidate);
    }
}

TEST_CASE("pure noise has no direct peak") {
    RangingConfig cfg;
    const auto ref = mls::generate_mls(10).samples();
    const auto noise = oracle::gaussian_noise(2400, 1.0, 9);
    try {
        detect_peaks(mls::cross_correlate(noise, ref), cfg);
        FAIL("expected RangingError");
    } catch (const RangingError& e) {
        CHECK(e.kind() == RangingError::Kind::NoDirectPeak);
    }
}

TEST_CASE("integer sampling error stays inside the analytic bound") {
    RangingConfig cfg;
    cfg.parabolic_interpolation = false;
    const auto ref = mls::generate_mls(10).samples();
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> hs(0.05, 1.0);
    const double v = cfg.speed_of_sound, d = cfg.speaker_mic_distance, dx = v / cfg.sample_rate;
    for (int i = 0; i < 60; ++i) {
        const double h = hs(rng);
        const auto rec = channel::simulate_channel(ref, channel::scenario_from_geometry(h, cfg), 0);
        const auto est = range_once(rec, ref, cfg);
        // dH/d(2s) = s / (2H) is largest at the shorter of the two paths.
        const double path = std::min(2.0 * std::sqrt(h * h + 0.25 * d * d), est.round_trip_path_m);
        const double s = 0.5 * path;
        const double hmin = std::sqrt(path * path - d * d) / 2.0;
        CAPTURE(h);
        CHECK(std::abs(est.height_m - h) <= dx * s / (2.0 * hmin) + 1e-12);
    }
}

TEST_CASE("retry: two garbage probes then a clean one") {
    RangingConfig cfg;
    const auto ref = mls::generate_mls(10).samples();
    const auto clean = channel::simulate_channel(ref, channel::scenario_from_geometry(0.3, cfg), 0);
    int calls = 0;
    TraceSource src = [&](int attempt) {
        ++calls;
        if (attempt <= 2) {
            return EchoTrace{oracle::gaussian_noise(2400, 1.0, static_cast<unsigned>(attempt)), 48000.0};
        }
        return clean;
    };
    const auto est = range_with_retry(src, ref, cfg);
    CHECK(calls == 3);
    CHECK(est.attempts_used == 3);
    CHECK(est.elapsed_retry_s == 2 * 0.050);
    CHECK(est.elapsed_retry_s == doctest::Approx(0.100));
    CHECK(est.height_m == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("retry: pure noise exhausts the attempts") {
    RangingConfig cfg;
    cfg.max_attempts = 5;
    const auto ref = mls::generate_mls(10).samples();
    int calls = 0;
    TraceSource src = [&](int attempt) {
        ++calls;
        return EchoTrace{oracle::gaussian_noise(2400, 1.0, 100u + static_cast<unsigned>(attempt)), 48000.0};
    };
    try {
        range_with_retry(src, ref, cfg);
        FAIL("expected RangingError");
    } catch (const RangingError& e) {
        CHECK(e.kind() == RangingError::Kind::AttemptsExhausted);
    }
    CHECK(calls == 5);
}

TEST_CASE("retry: quiet channel succeeds first time") {
    RangingConfig cfg;
    const auto ref = mls::generate_mls(10).samples();
    channel::ScenarioOptions opt;
    opt.noise_snr_db = 30.0;
    const auto ch = channel::scenario_from_geometry(0.3, cfg, opt);
    int first_try = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        TraceSource src = [&](int attempt) {
            return channel::simulate_channel(ref, ch, seed * 1000 + static_cast<std::uint64_t>(attempt));
        };
        const auto est = range_with_retry(src, ref, cfg);
        first_try += est.attempts_used == 1 ? 1 : 0;
        CHECK(est.elapsed_retry_s == 0.0);
    }
    CHECK(first_try >= 95);
}

TEST_CASE("recording is split into retry windows") {
    RangingConfig cfg;
    EchoTrace rec{std::vector<double>(2400 * 3 + 10, 0.0), 48000.0};
    CHECK(window_count(rec, cfg) == 3);
    const auto src = windowed_source(rec, cfg);
    CHECK(src(2).size() == 2400);
    CHECK_THROWS_AS(src(4), RangingError);

    EchoTrace short_rec{std::vector<double>(3000, 0.0), 48000.0};
    CHECK(window_count(short_rec, cfg) == 1);
    CHECK(windowed_source(short_rec, cfg)(1).size() == 3000);
}

TEST_CASE("config validation") {
    RangingConfig cfg;
    cfg.max_attempts = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.height_min = 1.0;
    cfg.height_max = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.speed_of_sound = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.peak_threshold_ratio = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
