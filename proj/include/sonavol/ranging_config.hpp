#pragma once

namespace sonavol {

/// Acoustic and detection parameters shared by the simulator and the
/// height solver.
struct RangingConfig {
    double speed_of_sound = 343.0;       // m/s
    double speaker_mic_distance = 0.12;  // m, speaker-to-microphone baseline
    double sample_rate = 48000.0;        // Hz

    double peak_threshold_ratio = 0.2;   // echo candidates must reach this fraction of the direct peak
    double min_peak_separation = 5e-5;   // s
    double min_peak_prominence = 6.0;    // direct peak over the robust noise sigma of the correlation
    bool parabolic_interpolation = true;

    double height_min = 0.05;            // m
    double height_max = 1.0;             // m

    double retry_interval = 0.050;       // s between repeated probes
    int max_attempts = 20;

    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

} // namespace sonavol
