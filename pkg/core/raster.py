"""
Landmark Rasterization
Draws the 68-point topology as white anti-aliased polylines on black
"""

from dataclasses import dataclass

import cv2
import numpy as np

from core.landmarks import REGIONS, Landmark, LandmarkSpace, denormalize_landmarks
from utils.errors import ConfigError

# Sub-pixel precision for cv2 drawing (coordinates scaled by 2**SHIFT)
SHIFT = 4
REFERENCE_SIZE = 64


@dataclass(frozen=True)
class RasterStyle:
    """thickness=None scales 1 px at 64x64 proportionally with resolution"""

    thickness: int | None = None
    color: tuple = (255, 255, 255)

    def resolve_thickness(self, height: int, width: int) -> int:
        if self.thickness is not None:
            return max(1, int(self.thickness))
        return max(1, int(round(min(height, width) / REFERENCE_SIZE)))


def to_fixed_point(points: np.ndarray) -> np.ndarray:
    # cv2 pixel centers sit on integer coordinates
    return np.round(points * (1 << SHIFT)).astype(np.int32)


def rasterize_landmarks(l: Landmark, height: int, width: int, style: RasterStyle = RasterStyle()) -> np.ndarray:
    """
    Render a landmark as an H x W x 3 conditioning image

    Args:
        l: Landmark (canonical landmarks are mapped to pixel space first)
        height: Output height H
        width: Output width W
        style: Line thickness and colour

    Returns:
        np.ndarray: float64 frame in [0, 1]; points outside the frame are clipped

    Raises:
        ConfigError: H or W not positive
    """
    if height <= 0 or width <= 0:
        raise ConfigError(f"Raster size must be positive, got {height}x{width}")
    if l.space is LandmarkSpace.CANONICAL:
        l = denormalize_landmarks(l, height, width)

    canvas = np.zeros((height, width, 3), dtype=np.uint8)
    thickness = style.resolve_thickness(height, width)

    # Far off-frame points would overflow the fixed-point range
    limit = 4.0 * max(height, width)
    points = np.clip(l.points, -limit, limit)

    for _, first, last, closed in REGIONS:
        polyline = to_fixed_point(points[first:last + 1]).reshape(-1, 1, 2)
        cv2.polylines(canvas, [polyline], closed, style.color, thickness, cv2.LINE_AA, SHIFT)

    return canvas.astype(np.float64) / 255.0
