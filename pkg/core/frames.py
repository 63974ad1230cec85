"""
Frame and Clip Primitives
Frames are H x W x 3 float64 arrays with values in [0, 1]
"""

from dataclasses import dataclass, field

import numpy as np
import torch

from core.landmarks import Landmark
from utils.errors import ContractViolation


def check_frame(frame: np.ndarray) -> np.ndarray:
    """
    Validate a frame and return it as float64

    Raises:
        ContractViolation: Wrong shape, non-finite values or values outside [0, 1]
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ContractViolation(f"Frame must be H x W x 3, got shape {frame.shape}")
    if not np.all(np.isfinite(frame)):
        raise ContractViolation("Frame contains non-finite values")
    if frame.min() < 0.0 or frame.max() > 1.0:
        raise ContractViolation("Frame values must lie in [0, 1]")
    return frame


def mask_lower_half(frame: np.ndarray) -> np.ndarray:
    """Pose reference: copy of the frame with rows >= H/2 set to zero"""
    masked = np.array(frame, dtype=np.float64, copy=True)
    masked[masked.shape[0] // 2:] = 0.0
    return masked


def frames_to_tensor(frames, dtype=torch.float32, device='cpu') -> torch.Tensor:
    """Stack H x W x 3 frames into a (B, 3, H, W) tensor"""
    array = np.stack([np.asarray(f) for f in frames]) if isinstance(frames, (list, tuple)) else np.asarray(frames)
    if array.ndim == 3:
        array = array[None]
    return torch.as_tensor(array, dtype=dtype, device=device).permute(0, 3, 1, 2).contiguous()


def tensor_to_frames(tensor: torch.Tensor) -> list:
    """Inverse of frames_to_tensor; values are clamped to [0, 1]"""
    array = tensor.detach().clamp(0.0, 1.0).permute(0, 2, 3, 1).cpu().double().numpy()
    return [np.ascontiguousarray(a) for a in array]


@dataclass
class VideoClip:
    """Ordered frames with optional per-frame landmarks"""

    frames: list
    fps: float
    landmarks: list | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.fps <= 0:
            raise ContractViolation("VideoClip fps must be positive")
        self.frames = [check_frame(f) for f in self.frames]
        if self.frames:
            shape = self.frames[0].shape
            bad = [i for i, f in enumerate(self.frames) if f.shape != shape]
            if bad:
                raise ContractViolation(f"All frames must share shape {shape}; frame {bad[0]} differs")
        if self.landmarks is not None:
            if len(self.landmarks) != len(self.frames):
                raise ContractViolation(
                    f"landmarks ({len(self.landmarks)}) and frames ({len(self.frames)}) differ in length"
                )
            if not all(isinstance(l, Landmark) for l in self.landmarks):
                raise ContractViolation("VideoClip landmarks must be Landmark instances")

    def __len__(self):
        return len(self.frames)

    @property
    def height(self) -> int:
        return self.frames[0].shape[0]

    @property
    def width(self) -> int:
        return self.frames[0].shape[1]

    def as_array(self) -> np.ndarray:
        return np.stack(self.frames)
