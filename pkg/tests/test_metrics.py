"""
PSNR, SSIM, Pixel-MSE, tLP and the metrics report
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import Config
from core.frames import VideoClip
from metrics.perceptual import ConvFeatureDistance
from metrics.quality import PSNR_CAP, gaussian_window, psnr, ssim
from metrics.report import MetricsReport, evaluate_video, format_table, table_row
from metrics.temporal import pixel_mse_series, pixel_mse_temporal, tlp, tlp_series
from utils.errors import ConfigError, ContractViolation, InsufficientFramesError
from utils.validators import validate_metrics_report


def clip_of(frames, fps=25.0) -> VideoClip:
    return VideoClip(list(frames), fps=fps)


def random_clip(rng, n=5, size=16) -> VideoClip:
    return clip_of(rng.uniform(size=(n, size, size, 3)))


class TestPSNR:
    def test_one_level_offset(self):
        value = psnr(np.zeros((4, 4, 3)), np.full((4, 4, 3), 1.0 / 255.0))
        assert value == pytest.approx(48.1308036087, abs=1e-6)

    def test_identical_frames_are_capped(self):
        frame = np.full((4, 4, 3), 0.3)
        assert psnr(frame, frame) == PSNR_CAP == 100.0

    def test_matches_double_loop(self, rng):
        a, b = rng.uniform(size=(6, 5, 3)), rng.uniform(size=(6, 5, 3))
        total = 0.0
        for i in range(6):
            for j in range(5):
                for c in range(3):
                    total += (a[i, j, c] - b[i, j, c]) ** 2
        assert psnr(a, b) == pytest.approx(10.0 * np.log10(90.0 / total), abs=1e-9)

    def test_shape_mismatch(self):
        with pytest.raises(ContractViolation):
            psnr(np.zeros((4, 4, 3)), np.zeros((4, 5, 3)))


def brute_force_ssim(a, b, window=11, c1=1e-4, c2=9e-4):
    w = gaussian_window(window)
    values = []
    for i in range(a.shape[0] - window + 1):
        for j in range(a.shape[1] - window + 1):
            pa, pb = a[i:i + window, j:j + window], b[i:i + window, j:j + window]
            mu_a, mu_b = np.sum(w * pa), np.sum(w * pb)
            var_a = np.sum(w * pa * pa) - mu_a ** 2
            var_b = np.sum(w * pb * pb) - mu_b ** 2
            cov = np.sum(w * pa * pb) - mu_a * mu_b
            values.append(((2 * mu_a * mu_b + c1) * (2 * cov + c2))
                          / ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)))
    return float(np.mean(values))


class TestSSIM:
    def test_identical_frames(self, rng):
        frame = rng.uniform(size=(16, 16, 3))
        assert ssim(frame, frame) == pytest.approx(1.0, abs=1e-12)

    def test_constant_frames(self):
        c1 = 0.01 ** 2
        value = ssim(np.zeros((16, 16, 3)), np.ones((16, 16, 3)))
        assert value == pytest.approx(c1 / (1.0 + c1), rel=1e-9)

    def test_matches_sliding_window(self, rng):
        a, b = rng.uniform(size=(16, 16)), rng.uniform(size=(16, 16))
        assert ssim(a, b) == pytest.approx(brute_force_ssim(a, b), abs=1e-6)

    def test_channels_are_averaged(self, rng):
        a, b = rng.uniform(size=(12, 12, 3)), rng.uniform(size=(12, 12, 3))
        per_channel = [brute_force_ssim(a[..., c], b[..., c]) for c in range(3)]
        assert ssim(a, b) == pytest.approx(np.mean(per_channel), abs=1e-6)

    def test_symmetric(self, rng):
        a, b = rng.uniform(size=(16, 16, 3)), rng.uniform(size=(16, 16, 3))
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)

    def test_frame_smaller_than_window(self):
        with pytest.raises(ConfigError):
            ssim(np.zeros((8, 8, 3)), np.zeros((8, 8, 3)))

    def test_even_window(self):
        with pytest.raises(ConfigError):
            ssim(np.zeros((16, 16, 3)), np.zeros((16, 16, 3)), window=10)


class TestPixelMSE:
    def test_static_video(self):
        assert pixel_mse_temporal(clip_of([np.full((4, 4, 3), 0.4)] * 5)) == 0.0

    def test_constant_step(self):
        c = 0.2
        v = clip_of([np.zeros((4, 4, 3)), np.full((4, 4, 3), c)])
        assert pixel_mse_temporal(v) == pytest.approx(c ** 2, abs=1e-15)

    def test_matches_double_loop(self, rng):
        v = random_clip(rng, n=4, size=5)
        frames = v.as_array()
        expected = []
        for i in range(1, 4):
            total = 0.0
            for idx in np.ndindex(frames.shape[1:]):
                total += (frames[i][idx] - frames[i - 1][idx]) ** 2
            expected.append(total / frames[i].size)
        assert np.allclose(pixel_mse_series(v), expected, atol=1e-10)
        assert pixel_mse_temporal(v) == pytest.approx(np.mean(expected), abs=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(offset=st.floats(0.0, 0.5))
    def test_invariant_to_constant_offset(self, offset):
        frames = np.random.default_rng(3).uniform(0.0, 0.5, size=(4, 6, 6, 3))
        a = pixel_mse_temporal(clip_of(frames))
        b = pixel_mse_temporal(clip_of(frames + offset))
        assert a == pytest.approx(b, abs=1e-12)

    def test_single_frame(self):
        with pytest.raises(InsufficientFramesError):
            pixel_mse_temporal(clip_of([np.zeros((4, 4, 3))]))


class TestPerceptual:
    def test_zero_on_identical(self, rng):
        frame = rng.uniform(size=(16, 16, 3))
        assert ConvFeatureDistance()(frame, frame) == 0.0

    def test_symmetric_and_positive(self, rng):
        pd = ConvFeatureDistance(seed=3)
        a, b = rng.uniform(size=(16, 16, 3)), rng.uniform(size=(16, 16, 3))
        assert pd(a, b) > 0.0
        assert pd(a, b) == pytest.approx(pd(b, a), abs=1e-12)

    def test_deterministic_per_seed(self, rng):
        a, b = rng.uniform(size=(16, 16, 3)), rng.uniform(size=(16, 16, 3))
        assert ConvFeatureDistance(1)(a, b) == ConvFeatureDistance(1)(a, b)
        assert ConvFeatureDistance(1)(a, b) != ConvFeatureDistance(2)(a, b)


class TestTLP:
    def test_static_video(self):
        assert tlp(clip_of([np.full((16, 16, 3), 0.5)] * 4)) == 0.0

    def test_referenced_against_itself(self, rng):
        v = random_clip(rng)
        assert tlp(v, v) == 0.0

    def test_referenced_is_absolute_difference(self, rng):
        v, ref = random_clip(rng), random_clip(rng)
        pd = ConvFeatureDistance()
        expected = [abs(pd(v.frames[i - 1], v.frames[i]) - pd(ref.frames[i - 1], ref.frames[i]))
                    for i in range(1, len(v))]
        assert np.allclose(tlp_series(v, ref, pd), expected, atol=1e-12)

    def test_reference_length_mismatch(self, rng):
        with pytest.raises(ContractViolation):
            tlp(random_clip(rng, n=4), random_clip(rng, n=5))

    def test_single_frame(self):
        with pytest.raises(InsufficientFramesError):
            tlp(clip_of([np.zeros((16, 16, 3))]))


class TestReport:
    def test_self_comparison(self, rng):
        v = random_clip(rng)
        report = evaluate_video(v, v)
        assert report.psnr_mean == 100.0
        assert report.ssim_mean == pytest.approx(1.0, abs=1e-12)
        assert report.tlp_referenced == 0.0
        assert report.lpips_proxy_mean == 0.0
        assert report.pixel_mse_temporal == pytest.approx(pixel_mse_temporal(v) * 1000.0)
        assert report.frames == 5
        assert len(report.series['tlp']) == 4

    def test_scaling(self, rng):
        v = random_clip(rng)
        report = evaluate_video(v, v, pd=lambda a, b: 0.00495)
        assert report.tlp == pytest.approx(0.495, abs=1e-12)
        assert report.tlp_unreferenced == pytest.approx(0.495, abs=1e-12)
        assert '0.495' in table_row('Full', report)

    def test_referenced_mode_selects_referenced(self, rng):
        v, gt = random_clip(rng), random_clip(rng)
        config = Config.load(environ={}, tlp_mode='referenced')
        report = evaluate_video(v, gt, config)
        assert report.tlp_mode == 'referenced'
        assert report.tlp == report.tlp_referenced
        assert report.config_hash == config.config_hash()

    def test_length_mismatch(self, rng):
        with pytest.raises(ContractViolation, match='differ'):
            evaluate_video(random_clip(rng, n=4), random_clip(rng, n=5))

    def test_json_round_trip_is_byte_equal(self, rng, tmp_path):
        v, gt = random_clip(rng), random_clip(rng)
        report = evaluate_video(v, gt, Config.load(environ={}))
        path = report.write(tmp_path / 'report.json')
        assert MetricsReport.read(path).to_json() == path.read_text()

    def test_report_passes_validation(self, rng):
        v, gt = random_clip(rng), random_clip(rng)
        report = evaluate_video(v, gt, Config.load(environ={}))
        assert validate_metrics_report(report.to_dict()) == (True, None)

    def test_table(self):
        table = format_table({'Full': {'tlp': 1.0, 'pixel_mse_temporal': 2.5}})
        assert table.splitlines()[0].startswith('| Setting')
        assert table.splitlines()[-1] == '| Full | 1.000 | 2.500 |'
