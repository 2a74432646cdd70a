import math

import numpy as np
import pytest

import sonavol


def test_mls_autocorrelation_is_two_valued():
    for order in range(2, 11):
        seq = sonavol.generate_mls(order)
        n = len(seq)
        assert n == 2**order - 1
        assert set(np.unique(seq)) == {-1.0, 1.0}
        r = sonavol.circular_autocorrelation(seq)
        assert r[0] == pytest.approx(1.0)
        np.testing.assert_allclose(r[1:], -1.0 / n, atol=1e-12)


def test_mls_rejects_non_primitive_taps():
    with pytest.raises(ValueError):
        sonavol.generate_mls(4, taps=[4, 2])


def test_cross_correlate_matches_numpy():
    rng = np.random.default_rng(3)
    a = rng.standard_normal(200)
    b = rng.standard_normal(31)
    want = np.correlate(a, b, mode="valid")
    got = sonavol.cross_correlate(a, b)
    assert len(got) == len(want)
    np.testing.assert_allclose(got, want, atol=1e-9)


def test_height_from_gap_inverts_geometry():
    v, d, h = 343.0, 0.12, 0.3
    gap = (math.sqrt(4 * h * h + d * d) - d) / v
    assert sonavol.height_from_gap(gap) == pytest.approx(h, rel=1e-12)


@pytest.mark.parametrize("height", [0.1, 0.3, 0.5])
def test_simulated_ranging(height):
    ref = sonavol.generate_mls(10)
    rec = sonavol.simulate(ref, height, snr_db=30.0, seed=11, fractional=True)
    est = sonavol.range_recording(rec, ref)
    assert est["height_m"] == pytest.approx(height, rel=0.015)
    assert est["attempts"] == 1
    assert est["elapsed_s"] == 0.0


def test_retry_callback_counts_attempts():
    ref = sonavol.generate_mls(10)
    silent = np.zeros(3000)
    good = sonavol.simulate(ref, 0.25, snr_db=None)

    def source(attempt):
        return good if attempt == 3 else silent

    est = sonavol.range_with_retry(source, ref)
    assert est["attempts"] == 3
    assert est["elapsed_s"] == pytest.approx(0.1)


def test_ranging_failure_raises():
    ref = sonavol.generate_mls(10)
    with pytest.raises(sonavol.RangingError):
        sonavol.range_recording(np.zeros(4000), ref)


def test_scale_reference_value():
    s = sonavol.meters_per_pixel(0.30)
    assert s["image_physical_width_m"] == pytest.approx(0.34698795180722886, rel=1e-12)
    assert s["meters_per_pixel"] == pytest.approx(1.0630758327427355e-4, rel=1e-12)


def test_cylinder_volume_matches_voxels():
    solid = sonavol.synth_solid("cylinder", 128, 256, 512)
    mpp = sonavol.meters_per_pixel(0.3)["meters_per_pixel"]
    report = sonavol.volume(solid["top"], solid["side"], 0.3)
    truth = solid["voxel_count"] * mpp**3
    assert report["volume_m3"] == pytest.approx(truth, rel=0.01)
    assert report["calibration_mode"] == "width-matching"


def test_explicit_side_scale():
    top = np.ones((10, 10), dtype=np.uint8)
    side = np.zeros((6, 10), dtype=np.uint8)
    side[2:, :] = 1
    mpp = sonavol.meters_per_pixel(0.3)["meters_per_pixel"]
    report = sonavol.volume(top, side, 0.3, config={"calibration": {"side_scale_m_per_px": mpp}})
    assert report["calibration_mode"] == "explicit-side-scale"
    assert report["volume_m3"] == pytest.approx(100 * mpp**2 * 4 * mpp, rel=1e-12)


def test_side_profile_is_bottom_up():
    side = np.zeros((4, 5), dtype=np.uint8)
    side[3, :] = 1
    side[2, 1:4] = 1
    assert sonavol.side_profile(side) == [5, 3]


def test_miou():
    a = np.zeros((4, 4), dtype=np.uint8)
    a[:, :2] = 1
    b = 1 - a
    assert sonavol.miou(a, a) == 1.0
    assert sonavol.miou(a, b) == 0.0
    r = sonavol.iou(a, b)
    assert r["food"] == 0.0 and r["background"] == 0.0


def test_mask_and_wav_io(tmp_path):
    mask = np.zeros((7, 9), dtype=np.uint8)
    mask[2:5, 3:8] = 1
    sonavol.write_pgm(tmp_path / "m.pgm", mask)
    np.testing.assert_array_equal(sonavol.read_mask(tmp_path / "m.pgm"), mask)

    ref = sonavol.generate_mls(6)
    sonavol.write_wav(tmp_path / "r.wav", ref, 48000.0)
    samples, rate = sonavol.read_wav(tmp_path / "r.wav")
    assert rate == 48000.0
    np.testing.assert_allclose(samples, ref, atol=1e-4)


def test_pipeline_stage_errors():
    ref = sonavol.generate_mls(10)
    rec = sonavol.simulate(ref, 0.3, snr_db=30.0, seed=2)
    solid = sonavol.synth_solid("cone", 64, 128, 256)
    report = sonavol.run_pipeline(rec, ref, solid["top"], solid["side"])
    assert report["schema_version"] == sonavol.REPORT_SCHEMA_VERSION
    assert report["volume"]["volume_m3"] > 0

    with pytest.raises(sonavol.StageError) as err:
        sonavol.run_pipeline(rec, ref, solid["top"])
    assert err.value.stage == "volumetry"

    with pytest.raises(sonavol.StageError) as err:
        sonavol.run_pipeline(np.zeros(4000), ref, solid["top"], solid["side"])
    assert err.value.stage == "ranging"

    with pytest.raises(ValueError):
        sonavol.run_pipeline(rec, ref, solid["top"], solid["side"], config={"nope": 1})
