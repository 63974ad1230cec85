"""
Noise Schedules
Fixed β tables with derived α and cumulative ᾱ, indexed by 1-based timestep
"""

from dataclasses import dataclass

import torch

from utils.errors import ConfigError, RangeError

SCHEDULE_KINDS = ('linear',)


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    """
    Markov chain of length T

    Tables are float64; callers cast to the dtype of their latents.
    """

    betas: torch.Tensor
    kind: str = 'linear'
    beta_start: float = 1e-4
    beta_end: float = 0.02

    def __post_init__(self):
        betas = torch.as_tensor(self.betas, dtype=torch.float64).reshape(-1)
        if betas.numel() < 1 or bool((betas <= 0).any()) or bool((betas >= 1).any()):
            raise ConfigError("Every beta must lie in (0, 1)")
        object.__setattr__(self, 'betas', betas)
        object.__setattr__(self, 'alphas', 1.0 - betas)
        object.__setattr__(self, 'alpha_bars', torch.cumprod(1.0 - betas, dim=0))

    @property
    def T(self) -> int:
        return self.betas.numel()

    def check_timestep(self, t):
        lo, hi = (int(t.min()), int(t.max())) if torch.is_tensor(t) else (int(t), int(t))
        if lo < 1 or hi > self.T:
            raise RangeError(f"Timestep outside [1, {self.T}]: {lo if lo < 1 else hi}")

    def alpha_bar(self, t: int) -> float:
        self.check_timestep(t)
        return float(self.alpha_bars[t - 1])

    def gather(self, table: torch.Tensor, t, like: torch.Tensor) -> torch.Tensor:
        """table[t-1] shaped to broadcast against `like` (t int or per-sample (B,) tensor)"""
        self.check_timestep(t)
        if torch.is_tensor(t) and t.dim() > 0:
            values = table[t.long().cpu() - 1]
            return values.to(dtype=like.dtype, device=like.device).reshape(-1, *([1] * (like.dim() - 1)))
        return table[int(t) - 1].to(dtype=like.dtype, device=like.device)

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'T': self.T,
            'beta_start': self.beta_start,
            'beta_end': self.beta_end,
            'betas': self.betas.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'NoiseSchedule':
        return cls(torch.tensor(data['betas'], dtype=torch.float64), data['kind'], data['beta_start'], data['beta_end'])


def make_schedule(T: int, kind: str = 'linear', beta_start: float = 1e-4, beta_end: float = 0.02) -> NoiseSchedule:
    """
    Linear β from beta_start to beta_end inclusive

    Example:
        >>> make_schedule(4).betas
        tensor([0.0001, 0.0067, 0.0134, 0.0200], dtype=torch.float64)
    """
    if kind not in SCHEDULE_KINDS:
        raise ConfigError(f"Unknown schedule kind '{kind}', expected one of {SCHEDULE_KINDS}")
    if T < 1:
        raise ConfigError(f"Schedule length must be at least 1, got {T}")
    if not 0 < beta_start <= beta_end < 1:
        raise ConfigError(f"Need 0 < beta_start <= beta_end < 1, got {beta_start}, {beta_end}")
    betas = torch.linspace(beta_start, beta_end, T, dtype=torch.float64)
    return NoiseSchedule(betas, kind, float(beta_start), float(beta_end))


def schedule_from_config(config) -> NoiseSchedule:
    return make_schedule(config.diffusion_steps, config.schedule_kind, config.beta_start, config.beta_end)
