"""
Landmark Geometry
68-point landmarks, canonical/pixel conversion and similarity transforms
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from utils.errors import ContractViolation, DegenerateGeometryError

N_POINTS = 68

# Standard 68-point topology: (name, first index, last index, closed)
REGIONS = (
    ('jaw', 0, 16, False),
    ('right_brow', 17, 21, False),
    ('left_brow', 22, 26, False),
    ('nose_bridge', 27, 30, False),
    ('nose_base', 31, 35, False),
    ('right_eye', 36, 41, True),
    ('left_eye', 42, 47, True),
    ('outer_lip', 48, 59, True),
    ('inner_lip', 60, 67, True),
)

# Eye corners + nose bridge: rigid under speech
DEFAULT_ANCHORS = (36, 39, 42, 45, 27, 28, 29, 30)

# Upper/lower inner-lip pairs used to measure mouth opening
INNER_LIP_PAIRS = ((61, 67), (62, 66), (63, 65))

CANONICAL_LIMIT = 1.5


class LandmarkSpace(str, Enum):
    PIXEL = 'pixel'
    CANONICAL = 'canonical'


@dataclass(frozen=True)
class Landmark:
    """68 facial keypoints in pixel or canonical ([-1, 1]^2) coordinates"""

    points: np.ndarray
    space: LandmarkSpace = LandmarkSpace.PIXEL

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.shape != (N_POINTS, 2):
            raise ContractViolation(f"Landmark needs shape ({N_POINTS}, 2), got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ContractViolation("Landmark coordinates must be finite")
        space = LandmarkSpace(self.space)
        if space is LandmarkSpace.CANONICAL and np.abs(points).max() > CANONICAL_LIMIT:
            raise ContractViolation(
                f"Canonical landmark exceeds [-{CANONICAL_LIMIT}, {CANONICAL_LIMIT}]: max |x| = {np.abs(points).max():.3f}"
            )
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'space', space)

    def with_points(self, points, space=None) -> 'Landmark':
        return Landmark(points, self.space if space is None else space)

    def translated(self, dx: float, dy: float) -> 'Landmark':
        return self.with_points(self.points + np.array([dx, dy]))

    def flat(self) -> np.ndarray:
        return self.points.reshape(-1)


@dataclass(frozen=True)
class AffineTransform:
    """p -> A p + b with invertible A"""

    matrix: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        translation = np.asarray(self.translation, dtype=np.float64)
        if matrix.shape != (2, 2) or translation.shape != (2,):
            raise ContractViolation("AffineTransform needs a 2x2 matrix and a 2-vector translation")
        if abs(np.linalg.det(matrix)) < 1e-15:
            raise DegenerateGeometryError("AffineTransform matrix is singular")
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'translation', translation)

    @classmethod
    def identity(cls) -> 'AffineTransform':
        return cls(np.eye(2), np.zeros(2))

    @classmethod
    def similarity(cls, scale: float, angle: float, translation) -> 'AffineTransform':
        c, s = np.cos(angle), np.sin(angle)
        return cls(scale * np.array([[c, -s], [s, c]]), np.asarray(translation, dtype=np.float64))

    def inverse(self) -> 'AffineTransform':
        inv = np.linalg.inv(self.matrix)
        return AffineTransform(inv, -inv @ self.translation)

    def compose(self, other: 'AffineTransform') -> 'AffineTransform':
        """self after other"""
        return AffineTransform(self.matrix @ other.matrix, self.matrix @ other.translation + self.translation)

    def apply_points(self, points: np.ndarray) -> np.ndarray:
        return points @ self.matrix.T + self.translation


def normalize_landmarks(l: Landmark, height: int, width: int) -> Landmark:
    """
    Map a pixel-space landmark into canonical [-1, 1]^2 space

    Args:
        l: Landmark in pixel space
        height: Frame height H
        width: Frame width W

    Returns:
        Landmark: x -> 2x/W - 1, y -> 2y/H - 1

    Example:
        >>> pts = np.full((68, 2), 32.0)
        >>> normalize_landmarks(Landmark(pts), 64, 64).points[0]
        array([0., 0.])
    """
    if l.space is not LandmarkSpace.PIXEL:
        raise ContractViolation("normalize_landmarks expects a pixel-space landmark")
    if height <= 0 or width <= 0:
        raise ContractViolation("height and width must be positive")
    scale = np.array([2.0 / width, 2.0 / height])
    return Landmark(l.points * scale - 1.0, LandmarkSpace.CANONICAL)


def denormalize_landmarks(l: Landmark, height: int, width: int) -> Landmark:
    """Inverse of normalize_landmarks"""
    if l.space is not LandmarkSpace.CANONICAL:
        raise ContractViolation("denormalize_landmarks expects a canonical landmark")
    if height <= 0 or width <= 0:
        raise ContractViolation("height and width must be positive")
    scale = np.array([width / 2.0, height / 2.0])
    return Landmark((l.points + 1.0) * scale, LandmarkSpace.PIXEL)


def estimate_similarity_transform(src: Landmark, dst: Landmark, anchor_indices=DEFAULT_ANCHORS) -> AffineTransform:
    """
    Least-squares similarity transform (rotation, uniform scale, translation)

    Solves min sum ||A src_i + b - dst_i||^2 over the anchor points in closed
    form by treating 2-D points as complex numbers: A acts as multiplication
    by c = sum(conj(s_i) d_i) / sum(|s_i|^2) on centered coordinates.

    Args:
        src: Landmark to map from (any space)
        dst: Landmark to map onto (any space)
        anchor_indices: At least two point indices used for the fit

    Returns:
        AffineTransform: The best-fitting similarity

    Raises:
        ContractViolation: Fewer than two anchors
        DegenerateGeometryError: All anchors of src coincide
    """
    anchors = np.unique(np.asarray(list(anchor_indices), dtype=int))
    if anchors.size < 2:
        raise ContractViolation("estimate_similarity_transform needs at least 2 anchor indices")
    if anchors.min() < 0 or anchors.max() >= N_POINTS:
        raise ContractViolation(f"anchor indices must lie in [0, {N_POINTS})")

    s = src.points[anchors]
    d = dst.points[anchors]
    s_mean = s.mean(axis=0)
    d_mean = d.mean(axis=0)
    zs = (s[:, 0] - s_mean[0]) + 1j * (s[:, 1] - s_mean[1])
    zd = (d[:, 0] - d_mean[0]) + 1j * (d[:, 1] - d_mean[1])

    energy = np.sum(np.abs(zs) ** 2)
    if energy <= 1e-20 * max(1.0, np.abs(s_mean).max() ** 2):
        raise DegenerateGeometryError("Anchor points coincide; similarity transform is undefined")

    c = np.sum(np.conj(zs) * zd) / energy
    if abs(c) < 1e-15:
        raise DegenerateGeometryError("Destination anchors coincide; similarity transform is singular")

    matrix = np.array([[c.real, -c.imag], [c.imag, c.real]])
    translation = d_mean - matrix @ s_mean
    return AffineTransform(matrix, translation)


def apply_affine(t: AffineTransform, l: Landmark, space=None) -> Landmark:
    """Map every point by A p + b; the result is tagged with `space` (default: l's)"""
    return Landmark(t.apply_points(l.points), l.space if space is None else space)


def inner_lip_gap(l: Landmark) -> float:
    """Mean vertical distance between paired upper and lower inner-lip points"""
    pts = l.points
    return float(np.mean([pts[lower, 1] - pts[upper, 1] for upper, lower in INNER_LIP_PAIRS]))


def inner_lip_gaps(points: np.ndarray) -> np.ndarray:
    """Vectorised inner_lip_gap over a (..., 68, 2) array"""
    uppers = [u for u, _ in INNER_LIP_PAIRS]
    lowers = [w for _, w in INNER_LIP_PAIRS]
    return (points[..., lowers, 1] - points[..., uppers, 1]).mean(axis=-1)
