"""
Cartoon Face Renderer
Filled-polygon faces whose features follow the landmarks exactly
"""

import cv2
import numpy as np

from core.landmarks import Landmark, LandmarkSpace, inner_lip_gap
from core.raster import SHIFT, to_fixed_point
from synthdata.identity import SyntheticIdentity
from synthdata.trajectory import JAW_SCALE
from utils.errors import ContractViolation

BACKGROUND = (0.12, 0.14, 0.18)
EYE_WHITE = (0.96, 0.96, 0.94)
PUPIL = (0.10, 0.08, 0.08)
BROW = (0.28, 0.18, 0.12)
MOUTH_INSIDE = (0.22, 0.04, 0.07)


def _rgb255(rgb) -> tuple:
    # canvas channels are RGB; cv2 treats them as opaque triples
    return tuple(int(round(255.0 * c)) for c in rgb)


def render_face(identity: SyntheticIdentity, l: Landmark, height: int, width: int) -> np.ndarray:
    """
    Draw one frame of the identity's face at landmark l

    Args:
        identity: Colours come from here; geometry comes from l
        l: Pixel-space landmark
        height: Frame height
        width: Frame width

    Returns:
        np.ndarray: H x W x 3 float64 frame, values k/255

    Example:
        >>> frame = render_face(identity, pixel_landmark, 64, 64)
        >>> frame.shape
        (64, 64, 3)
    """
    if l.space is not LandmarkSpace.PIXEL:
        raise ContractViolation("render_face expects a pixel-space landmark")
    pts = l.points
    canvas = np.empty((height, width, 3), dtype=np.uint8)
    canvas[:] = _rgb255(BACKGROUND)
    scale = min(height, width) / 64.0
    line = max(1, int(round(scale)))

    skin = identity.skin_rgb
    shade = tuple(c * 0.8 for c in skin)

    # Skin ellipse anchored on the jaw ends (ear level) and the chin
    center = (pts[0] + pts[16]) / 2.0
    axes = np.array([
        abs(pts[16, 0] - pts[0, 0]) / 2.0 / JAW_SCALE,
        max(pts[8, 1] - center[1], 1.0) / JAW_SCALE,
    ])
    cv2.ellipse(
        canvas, tuple(int(v) for v in to_fixed_point(center)), tuple(int(v) for v in to_fixed_point(axes)),
        0.0, 0.0, 360.0, _rgb255(skin), -1, cv2.LINE_AA, SHIFT,
    )
    cv2.polylines(canvas, [to_fixed_point(pts[0:17]).reshape(-1, 1, 2)], False, _rgb255(shade), line, cv2.LINE_AA, SHIFT)

    for first in (36, 42):
        eye = pts[first:first + 6]
        cv2.fillPoly(canvas, [to_fixed_point(eye).reshape(-1, 1, 2)], _rgb255(EYE_WHITE), cv2.LINE_AA, SHIFT)
        radius = max(abs(eye[4, 1] - eye[2, 1]) * 0.45, 0.5)
        cv2.circle(
            canvas, tuple(int(v) for v in to_fixed_point(eye.mean(axis=0))), int(round(radius * (1 << SHIFT))),
            _rgb255(PUPIL), -1, cv2.LINE_AA, SHIFT,
        )

    for first in (17, 22):
        brow = to_fixed_point(pts[first:first + 5]).reshape(-1, 1, 2)
        cv2.polylines(canvas, [brow], False, _rgb255(BROW), line + 1, cv2.LINE_AA, SHIFT)

    cv2.polylines(canvas, [to_fixed_point(pts[27:31]).reshape(-1, 1, 2)], False, _rgb255(shade), line, cv2.LINE_AA, SHIFT)
    cv2.polylines(canvas, [to_fixed_point(pts[31:36]).reshape(-1, 1, 2)], False, _rgb255(shade), line, cv2.LINE_AA, SHIFT)

    cv2.fillPoly(canvas, [to_fixed_point(pts[48:60]).reshape(-1, 1, 2)], _rgb255(identity.lip_rgb), cv2.LINE_AA, SHIFT)
    if inner_lip_gap(l) > 1e-9:
        cv2.fillPoly(canvas, [to_fixed_point(pts[60:68]).reshape(-1, 1, 2)], _rgb255(MOUTH_INSIDE), cv2.LINE_AA, SHIFT)

    return canvas.astype(np.float64) / 255.0


def lip_bounding_box(*landmarks: Landmark, margin: int = 2) -> tuple:
    """(row0, row1, col0, col1) covering the lip points of every landmark, plus margin"""
    lips = np.concatenate([l.points[48:68] for l in landmarks])
    col0, row0 = np.floor(lips.min(axis=0)).astype(int) - margin
    col1, row1 = np.ceil(lips.max(axis=0)).astype(int) + margin + 1
    return max(row0, 0), row1, max(col0, 0), col1


def measure_mouth_opening(frame: np.ndarray, box: tuple) -> float:
    """
    Darkness of the mouth interior inside a lip box

    Counts (softly) pixels whose colour is close to the mouth-interior
    colour; used as the pixel-space oracle for mouth opening.
    """
    row0, row1, col0, col1 = box
    patch = frame[row0:row1, col0:col1]
    distance = np.linalg.norm(patch - np.asarray(MOUTH_INSIDE), axis=-1)
    return float(np.clip(1.0 - distance / 0.35, 0.0, 1.0).sum())
