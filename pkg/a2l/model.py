"""
Landmark Generation Network
Context LSTM (speaker-independent motion) followed by an identity LSTM (personal style)
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn

from a2l.sequence import LandmarkSequence
from audio.features import ContentWindow, FeatureConfig, IdentityEmbedding
from core.landmarks import N_POINTS, Landmark, LandmarkSpace
from utils.checkpoints import load_checkpoint, save_checkpoint
from utils.errors import ContractViolation

logger = logging.getLogger(__name__)

LANDMARK_DIM = N_POINTS * 2
COMPONENT = 'a2l'


@dataclass(frozen=True)
class A2LHyperParams:
    content_dim: int = 32
    identity_dim: int = 32
    window: int = 9
    hidden: int = 32

    @classmethod
    def from_config(cls, config) -> 'A2LHyperParams':
        return cls(
            content_dim=config.content_dim,
            identity_dim=config.identity_dim,
            window=config.audio_window,
            hidden=config.a2l_hidden,
        )


class A2LModel(nn.Module):
    """
    Two single-layer LSTMs with residual displacement heads

    Both heads start at zero, so an untrained model returns l0 from the
    context stage and the intermediate landmarks from the identity stage.
    """

    def __init__(self, params: A2LHyperParams):
        super().__init__()
        self.params = params
        window_dim = params.window * params.content_dim
        self.context_lstm = nn.LSTM(window_dim + LANDMARK_DIM, params.hidden, batch_first=True)
        self.context_head = nn.Linear(params.hidden, LANDMARK_DIM)
        self.identity_lstm = nn.LSTM(window_dim + params.identity_dim + LANDMARK_DIM, params.hidden, batch_first=True)
        self.identity_head = nn.Linear(params.hidden, LANDMARK_DIM)
        for head in (self.context_head, self.identity_head):
            nn.init.zeros_(head.weight)
            nn.init.zeros_(head.bias)

    def _check_windows(self, windows: torch.Tensor):
        expected = (self.params.window, self.params.content_dim)
        if windows.dim() != 4 or tuple(windows.shape[2:]) != expected:
            raise ContractViolation(f"Windows must be (B, K, {expected[0]}, {expected[1]}), got {tuple(windows.shape)}")

    def context(self, windows: torch.Tensor, l0: torch.Tensor, state=None):
        """
        Intermediate landmarks l̄_i = l0 + Δ_i

        Args:
            windows: (B, K, W_a, D1) content windows
            l0: (B, 136) initial canonical landmark
            state: LSTM state to continue from

        Returns:
            tuple: (B, K, 136) landmarks and the final LSTM state
        """
        self._check_windows(windows)
        if l0.shape != (windows.shape[0], LANDMARK_DIM):
            raise ContractViolation(f"l0 must be (B, {LANDMARK_DIM}), got {tuple(l0.shape)}")
        steps = windows.shape[1]
        base = l0.unsqueeze(1).expand(-1, steps, -1)
        inputs = torch.cat([windows.flatten(2), base], dim=-1)
        hidden, state = self.context_lstm(inputs, state)
        return base + self.context_head(hidden), state

    def identity(self, windows: torch.Tensor, a_id: torch.Tensor, intermediate: torch.Tensor, state=None):
        """Refined landmarks l̃_i = l̄_i + Δ'_i conditioned on (window_i, a_id, l̄_i)"""
        self._check_windows(windows)
        if intermediate.shape[:2] != windows.shape[:2]:
            raise ContractViolation(
                f"Intermediate length {intermediate.shape[1]} does not match {windows.shape[1]} windows"
            )
        if a_id.shape != (windows.shape[0], self.params.identity_dim):
            raise ContractViolation(f"a_id must be (B, {self.params.identity_dim}), got {tuple(a_id.shape)}")
        speaker = a_id.unsqueeze(1).expand(-1, windows.shape[1], -1)
        inputs = torch.cat([windows.flatten(2), speaker, intermediate], dim=-1)
        hidden, state = self.identity_lstm(inputs, state)
        return intermediate + self.identity_head(hidden), state

    def forward(self, windows: torch.Tensor, a_id: torch.Tensor, l0: torch.Tensor):
        intermediate, _ = self.context(windows, l0)
        final, _ = self.identity(windows, a_id, intermediate)
        return intermediate, final

    @property
    def dtype(self) -> torch.dtype:
        return self.context_head.weight.dtype

    def save(self, path, config_hash: str, features: FeatureConfig, **extras):
        return save_checkpoint(
            path, COMPONENT, self.state_dict(), config_hash, asdict(self.params),
            features=features.to_dict(), **extras,
        )

    @classmethod
    def load(cls, path) -> tuple:
        """Rebuild a model from its checkpoint; returns (model, FeatureConfig, payload)"""
        payload = load_checkpoint(path, COMPONENT)
        model = cls(A2LHyperParams(**payload['config']))
        model.load_state_dict(payload['state_dict'])
        model.eval()
        return model, FeatureConfig(**payload['features']), payload


def _windows_tensor(m: A2LModel, windows) -> torch.Tensor:
    if len(windows) == 0:
        raise ContractViolation("At least one content window is required")
    stacked = np.stack([w.values if isinstance(w, ContentWindow) else np.asarray(w) for w in windows])
    return torch.as_tensor(stacked, dtype=m.dtype).unsqueeze(0)


def _landmark_tensor(m: A2LModel, l: Landmark) -> torch.Tensor:
    if l.space is not LandmarkSpace.CANONICAL:
        raise ContractViolation("A2L expects a canonical landmark")
    return torch.as_tensor(l.flat(), dtype=m.dtype).unsqueeze(0)


@torch.no_grad()
def context_forward(m: A2LModel, windows, l0: Landmark, fps: float = 25.0) -> LandmarkSequence:
    """
    Speaker-independent landmark sequence for a list of content windows

    Example:
        >>> seq = context_forward(model, windows, rest_landmark)
        >>> len(seq) == len(windows)
        True
    """
    out, _ = m.context(_windows_tensor(m, windows), _landmark_tensor(m, l0))
    return LandmarkSequence.from_prediction(out[0], fps, stage='context')


@torch.no_grad()
def identity_forward(m: A2LModel, windows, a_id: IdentityEmbedding, intermediate: LandmarkSequence) -> LandmarkSequence:
    """Personal-style refinement of an intermediate sequence"""
    if len(windows) != len(intermediate):
        raise ContractViolation(f"{len(windows)} windows but {len(intermediate)} intermediate landmarks")
    speaker = torch.as_tensor(np.asarray(a_id.values), dtype=m.dtype).unsqueeze(0)
    out, _ = m.identity(_windows_tensor(m, windows), speaker, intermediate.to_tensor(m.dtype).unsqueeze(0))
    return LandmarkSequence.from_prediction(out[0], intermediate.fps, stage='identity')
