"""
Landmark Sequences
Ordered canonical landmarks at a fixed frame rate
"""

from dataclasses import dataclass

import numpy as np
import torch

from core.landmarks import CANONICAL_LIMIT, N_POINTS, Landmark, LandmarkSpace, inner_lip_gaps
from utils.errors import ContractViolation, ModelDivergenceError


@dataclass(frozen=True)
class LandmarkSequence:
    items: tuple
    fps: float

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ContractViolation("LandmarkSequence must not be empty")
        if any(l.space is not LandmarkSpace.CANONICAL for l in items):
            raise ContractViolation("LandmarkSequence items must be canonical")
        if self.fps <= 0:
            raise ContractViolation("LandmarkSequence fps must be positive")
        object.__setattr__(self, 'items', items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, index):
        return self.items[index]

    def as_array(self) -> np.ndarray:
        """K x 68 x 2 points"""
        return np.stack([l.points for l in self.items])

    def to_tensor(self, dtype=torch.float32) -> torch.Tensor:
        """K x 136 tensor, x/y interleaved per point"""
        return torch.as_tensor(self.as_array().reshape(len(self), N_POINTS * 2), dtype=dtype)

    @classmethod
    def from_array(cls, points, fps: float) -> 'LandmarkSequence':
        points = np.asarray(points, dtype=np.float64).reshape(-1, N_POINTS, 2)
        return cls(tuple(Landmark(p, LandmarkSpace.CANONICAL) for p in points), fps)

    @classmethod
    def from_prediction(cls, tensor: torch.Tensor, fps: float, stage: str) -> 'LandmarkSequence':
        """
        Model output -> sequence, naming the first frame that left the canonical range

        Raises:
            ModelDivergenceError: A frame is non-finite or exceeds CANONICAL_LIMIT
        """
        points = tensor.detach().cpu().double().numpy().reshape(-1, N_POINTS, 2)
        bad = ~np.isfinite(points).all(axis=(1, 2)) | (np.abs(points).max(axis=(1, 2)) > CANONICAL_LIMIT)
        if bad.any():
            frame = int(np.argmax(bad))
            raise ModelDivergenceError(
                f"{stage} prediction diverged at frame {frame} of {len(points)}: "
                f"max |x| = {np.abs(points[frame]).max():.3f} (canonical limit {CANONICAL_LIMIT})"
            )
        return cls.from_array(points, fps)

    def inner_lip_gaps(self) -> np.ndarray:
        return inner_lip_gaps(self.as_array())
