"""
Landmark geometry, rasterization and frame primitives shared by every stage
"""

from core.frames import VideoClip, check_frame, frames_to_tensor, mask_lower_half, tensor_to_frames
from core.landmarks import (
    DEFAULT_ANCHORS,
    N_POINTS,
    REGIONS,
    AffineTransform,
    Landmark,
    LandmarkSpace,
    apply_affine,
    denormalize_landmarks,
    estimate_similarity_transform,
    inner_lip_gap,
    inner_lip_gaps,
    normalize_landmarks,
)
from core.raster import RasterStyle, rasterize_landmarks

__all__ = [
    'AffineTransform', 'DEFAULT_ANCHORS', 'Landmark', 'LandmarkSpace', 'N_POINTS', 'REGIONS',
    'RasterStyle', 'VideoClip', 'apply_affine', 'check_frame', 'denormalize_landmarks',
    'estimate_similarity_transform', 'frames_to_tensor', 'inner_lip_gap', 'inner_lip_gaps',
    'mask_lower_half', 'normalize_landmarks', 'rasterize_landmarks', 'tensor_to_frames',
]
