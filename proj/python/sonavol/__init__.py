"""Echo-ranged food volume estimation."""

from ._core import (
    REPORT_SCHEMA_VERSION,
    __version__,
    RangingError,
    StageError,
    circular_autocorrelation,
    cross_correlate,
    default_taps,
    environment_snr_db,
    generate_mls,
    height_from_gap,
    iou,
    meters_per_pixel,
    miou,
    range_recording,
    range_with_retry,
    read_mask,
    read_wav,
    run_pipeline,
    side_profile,
    simulate,
    simulate_channel,
    synth_solid,
    volume,
    write_pgm,
    write_wav,
)

__all__ = [name for name in dir() if not name.startswith("_")]
