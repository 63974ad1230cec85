"""
Landmark Trajectories
Rest-pose templates and mouth motion driven by a known control signal
"""

import numpy as np

from a2l.sequence import LandmarkSequence
from core.landmarks import N_POINTS, Landmark, LandmarkSpace
from synthdata.identity import DrivingSignal, SyntheticIdentity

# Maximum inner-lip opening (center pair) at d = 1 and mouth_gain = 1, canonical units
MAX_GAP = 0.16
INNER_WEIGHTS = np.array([0.8, 1.0, 0.8])
OUTER_OPEN_WEIGHTS = np.array([0.6, 0.9, 1.0, 0.9, 0.6])
OUTER_TOP_PROFILE = np.array([0.8, 1.0, 0.8, 1.0, 0.8])
OUTER_BOTTOM_PROFILE = np.array([0.8, 1.0, 1.1, 1.0, 0.8])

EYE_Y = -0.12
EYE_WIDTH = 0.16
EYE_HEIGHT = 0.06
BROW_OFFSET = 0.13
NOSE_TIP_Y = 0.12
MOUTH_Y = 0.40
JAW_SCALE = 0.95
JITTER_AMPLITUDE = 0.006
JITTER_POINTS = np.arange(17, 27).tolist() + np.arange(36, 48).tolist()


def rest_template(identity: SyntheticIdentity) -> np.ndarray:
    """68 x 2 canonical points of the closed-mouth rest pose"""
    pts = np.zeros((N_POINTS, 2))

    theta = np.linspace(np.pi, 0.0, 17)
    pts[0:17, 0] = identity.skull_rx * JAW_SCALE * np.cos(theta)
    pts[0:17, 1] = identity.skull_ry * JAW_SCALE * np.sin(theta)

    es = identity.eye_spacing
    u = np.linspace(0.0, 1.0, 5)
    brow_y = EYE_Y - BROW_OFFSET - 0.03 * np.sin(np.pi * u)
    pts[17:22, 0] = np.linspace(-es - 0.11, -es + 0.10, 5)
    pts[17:22, 1] = brow_y
    pts[22:27, 0] = np.linspace(es - 0.10, es + 0.11, 5)
    pts[22:27, 1] = brow_y[::-1]

    pts[27:31, 0] = 0.0
    pts[27:31, 1] = np.linspace(EYE_Y, NOSE_TIP_Y, 4)
    v = np.linspace(-1.0, 1.0, 5)
    pts[31:36, 0] = 0.08 * v
    pts[31:36, 1] = NOSE_TIP_Y + 0.05 - 0.02 * (1.0 - np.abs(v))

    hw, hh = EYE_WIDTH / 2.0, EYE_HEIGHT / 2.0
    # 36/45 outer corners, 39/42 inner corners, clockwise from the left corner
    for first, cx in ((36, -es), (42, es)):
        ring = np.array([
            [-hw, 0.0], [-hw / 3, -hh], [hw / 3, -hh], [hw, 0.0], [hw / 3, hh], [-hw / 3, hh],
        ])
        pts[first:first + 6] = ring + np.array([cx, EYE_Y])

    mw, lt = identity.mouth_width, identity.lip_thickness
    top_x = mw * np.array([-2, -1, 0, 1, 2]) / 3.0
    pts[48] = [-mw, MOUTH_Y]
    pts[49:54, 0] = top_x
    pts[49:54, 1] = MOUTH_Y - lt * OUTER_TOP_PROFILE
    pts[54] = [mw, MOUTH_Y]
    pts[55:60, 0] = top_x[::-1]
    pts[55:60, 1] = MOUTH_Y + lt * OUTER_BOTTOM_PROFILE

    inner_x = mw * np.array([-0.4, 0.0, 0.4])
    pts[60] = [-0.8 * mw, MOUTH_Y]
    pts[61:64, 0] = inner_x
    pts[61:64, 1] = MOUTH_Y
    pts[64] = [0.8 * mw, MOUTH_Y]
    pts[65:68, 0] = inner_x[::-1]
    pts[65:68, 1] = MOUTH_Y
    return pts


def opening(identity: SyntheticIdentity, d) -> np.ndarray:
    """Center-pair lip opening g(d) = MAX_GAP * mouth_gain * d"""
    return MAX_GAP * identity.mouth_gain * np.asarray(d, dtype=np.float64)


def gap_for_signal(identity: SyntheticIdentity, d) -> np.ndarray:
    """Measured inner-lip gap (mean over the three pairs) for control value d"""
    return opening(identity, d) * INNER_WEIGHTS.mean()


def signal_for_gap(identity: SyntheticIdentity, gap) -> np.ndarray:
    """Inverse of gap_for_signal"""
    return np.asarray(gap, dtype=np.float64) / (MAX_GAP * identity.mouth_gain * INNER_WEIGHTS.mean())


def apply_mouth(points: np.ndarray, g: float) -> np.ndarray:
    """Open the mouth of a rest pose by center opening g (returns a copy)"""
    pts = points.copy()
    half = g / 2.0
    pts[49:54, 1] -= half * OUTER_OPEN_WEIGHTS
    pts[55:60, 1] += half * OUTER_OPEN_WEIGHTS[::-1]
    pts[61:64, 1] -= half * INNER_WEIGHTS
    pts[65:68, 1] += half * INNER_WEIGHTS[::-1]
    return pts


def sample_trajectory(identity: SyntheticIdentity, d: DrivingSignal) -> LandmarkSequence:
    """
    Canonical landmark sequence for one driving signal

    Lip points move vertically in proportion to d, so the inner-lip gap is
    exactly affine in d; eyes and brows get a small smooth jitter seeded by
    the identity.

    Args:
        identity: Face parameters
        d: Mouth-opening control, one value per frame

    Returns:
        LandmarkSequence: One canonical landmark per driving value
    """
    rest = rest_template(identity)
    rng = np.random.default_rng(identity.seed + 7919)
    freqs = rng.uniform(0.2, 0.6, size=2)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
    t = np.arange(len(d)) / d.fps
    jitter_x = JITTER_AMPLITUDE * np.sin(2.0 * np.pi * freqs[0] * t + phases[0])
    jitter_y = JITTER_AMPLITUDE * np.sin(2.0 * np.pi * freqs[1] * t + phases[1])

    items = []
    for i, g in enumerate(opening(identity, d.values)):
        pts = apply_mouth(rest, g)
        pts[JITTER_POINTS, 0] += jitter_x[i]
        pts[JITTER_POINTS, 1] += jitter_y[i]
        items.append(Landmark(pts, LandmarkSpace.CANONICAL))
    return LandmarkSequence(items, d.fps)
