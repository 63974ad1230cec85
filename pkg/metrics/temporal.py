"""
Temporal Consistency Metrics
Pixel-MSE and tLP over consecutive frame pairs (raw values; reports apply the scaling)
"""

import numpy as np

from core.frames import VideoClip
from metrics.perceptual import ConvFeatureDistance
from utils.errors import ContractViolation, InsufficientFramesError

TLP_MODES = ('unreferenced', 'referenced')


def _require_pairs(v: VideoClip):
    if len(v) < 2:
        raise InsufficientFramesError(f"Temporal metrics need at least 2 frames, got {len(v)}")


def pixel_mse_series(v: VideoClip) -> np.ndarray:
    """Per-pair MSE between consecutive frames (identity alignment)"""
    _require_pairs(v)
    frames = v.as_array()
    return np.mean((frames[1:] - frames[:-1]) ** 2, axis=(1, 2, 3))


def pixel_mse_temporal(v: VideoClip) -> float:
    return float(pixel_mse_series(v).mean())


def _pair_distances(v: VideoClip, pd) -> np.ndarray:
    return np.array([pd(v.frames[i - 1], v.frames[i]) for i in range(1, len(v))])


def tlp_series(v: VideoClip, ref: VideoClip | None = None, pd=None) -> np.ndarray:
    _require_pairs(v)
    pd = pd if pd is not None else ConvFeatureDistance()
    generated = _pair_distances(v, pd)
    if ref is None:
        return generated
    if len(ref) != len(v):
        raise ContractViolation(f"Referenced tLP needs equal lengths, got {len(v)} and {len(ref)}")
    return np.abs(generated - _pair_distances(ref, pd))


def tlp(v: VideoClip, ref: VideoClip | None = None, pd=None) -> float:
    """
    Mean perceptual distance of consecutive frames

    Without `ref` this is the unreferenced form; with `ref` it is the mean
    |pd(generated pair) - pd(reference pair)|.
    """
    return float(tlp_series(v, ref, pd).mean())
