"""
Landmark Coordinate Encoder
Canonical 68 x 2 landmark -> D_l embedding used as cross-attention key/value
"""

import torch
from torch import nn

from core.landmarks import N_POINTS
from utils.errors import ContractViolation


class LandmarkEncoder(nn.Module):
    def __init__(self, landmark_dim: int = 64, hidden: int = 128):
        super().__init__()
        self.landmark_dim = landmark_dim
        self.hidden = hidden
        self.net = nn.Sequential(
            nn.Linear(N_POINTS * 2, hidden),
            nn.SiLU(),
            nn.Linear(hidden, hidden),
            nn.SiLU(),
            nn.Linear(hidden, landmark_dim),
        )

    def forward(self, landmarks: torch.Tensor) -> torch.Tensor:
        """(B, 136) or (B, 68, 2) canonical coordinates -> (B, D_l)"""
        flat = landmarks.reshape(landmarks.shape[0], -1)
        if flat.shape[1] != N_POINTS * 2:
            raise ContractViolation(f"Expected {N_POINTS} landmark points, got {tuple(landmarks.shape)}")
        return self.net(flat)
