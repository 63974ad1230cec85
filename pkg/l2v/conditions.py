"""
Denoiser Conditions
Pose, identity and landmark latents plus the landmark coordinate embedding
"""

from dataclasses import dataclass

import numpy as np
import torch

from config import ABLATION_MODES
from core.frames import check_frame, frames_to_tensor
from core.landmarks import Landmark, LandmarkSpace, normalize_landmarks
from core.raster import rasterize_landmarks
from utils.errors import ConfigError, ContractViolation


def check_ablation(ablation: str):
    if ablation not in ABLATION_MODES:
        raise ConfigError(f"Unknown ablation '{ablation}', expected one of {ABLATION_MODES}")


@dataclass
class ConditionSet:
    """
    Guidance bundle for one batch

    z_l is None in no_visual mode and C_l is None in no_corr mode.
    """

    z_p: torch.Tensor
    z_id: torch.Tensor
    z_l: torch.Tensor | None = None
    C_l: torch.Tensor | None = None

    def __post_init__(self):
        shape = self.z_p.shape
        latents = [('z_id', self.z_id)] + ([('z_l', self.z_l)] if self.z_l is not None else [])
        for name, z in latents:
            if z.shape != shape:
                raise ContractViolation(f"{name} shape {tuple(z.shape)} != z_p shape {tuple(shape)}")
        if self.C_l is not None and (self.C_l.dim() != 2 or self.C_l.shape[0] != shape[0]):
            raise ContractViolation(f"C_l must be (B, D_l) with B={shape[0]}, got {tuple(self.C_l.shape)}")

    def spatial(self) -> list:
        """Latents in concatenation order [z_l?, z_p, z_id]"""
        return ([self.z_l] if self.z_l is not None else []) + [self.z_p, self.z_id]


def conditions_from_latents(z_p, z_id, z_l, landmarks, el, ablation: str) -> ConditionSet:
    """Assemble a ConditionSet from encoded latents and canonical (B, 136) landmarks"""
    check_ablation(ablation)
    return ConditionSet(
        z_p=z_p,
        z_id=z_id,
        z_l=None if ablation == 'no_visual' else z_l,
        C_l=None if ablation == 'no_corr' else el(landmarks),
    )


def build_conditions(ae, el, x_p: np.ndarray, x_id: np.ndarray, l: Landmark, ablation: str = 'full') -> ConditionSet:
    """
    Encode the conditions for one target frame

    Args:
        ae: Trained autoencoder
        el: Landmark encoder
        x_p: Pose reference frame (lower half already masked)
        x_id: Identity reference frame
        l: Pixel-space landmark of the target frame
        ablation: 'full', 'no_visual' or 'no_corr'

    Returns:
        ConditionSet: Batch of one
    """
    check_ablation(ablation)
    if l.space is not LandmarkSpace.PIXEL:
        raise ContractViolation("build_conditions expects a pixel-space landmark")
    x_p = check_frame(x_p)
    x_id = check_frame(x_id)
    height, width = x_p.shape[:2]
    dtype = ae.dtype
    with torch.no_grad():
        z_p = ae.encode(frames_to_tensor(x_p, dtype))
        z_id = ae.encode(frames_to_tensor(x_id, dtype))
        z_l = None
        if ablation != 'no_visual':
            z_l = ae.encode(frames_to_tensor(rasterize_landmarks(l, height, width), dtype))
        landmarks = torch.as_tensor(normalize_landmarks(l, height, width).flat(), dtype=dtype).unsqueeze(0)
        return conditions_from_latents(z_p, z_id, z_l, landmarks, el, ablation)
