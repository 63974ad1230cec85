"""
Forward Process and Training Objective
Closed-form noising, single Markov transitions and the ε-prediction loss
"""

from typing import Protocol

import torch

from diffusion.schedule import NoiseSchedule
from utils.errors import ContractViolation


class Denoiser(Protocol):
    """(z_t, t, conditions) -> ε̂ with the shape of z_t; t is a (B,) long tensor of 1-based steps"""

    def __call__(self, z_t: torch.Tensor, t: torch.Tensor, conditions=None) -> torch.Tensor:
        ...


def forward_diffuse(s: NoiseSchedule, z0: torch.Tensor, t, eps: torch.Tensor) -> torch.Tensor:
    """
    z_t = √ᾱ_t · z0 + √(1 − ᾱ_t) · ε

    Args:
        s: Noise schedule
        z0: Clean sample(s)
        t: 1-based step, int or per-sample (B,) tensor
        eps: Noise of z0's shape

    Raises:
        RangeError: t outside [1, T]
    """
    if eps.shape != z0.shape:
        raise ContractViolation(f"eps shape {tuple(eps.shape)} != z0 shape {tuple(z0.shape)}")
    alpha_bar = s.gather(s.alpha_bars, t, z0)
    return alpha_bar.sqrt() * z0 + (1.0 - alpha_bar).sqrt() * eps


def forward_step(s: NoiseSchedule, z_prev: torch.Tensor, t, eps: torch.Tensor) -> torch.Tensor:
    """One Markov transition z_t = √α_t · z_{t−1} + √β_t · ε"""
    if eps.shape != z_prev.shape:
        raise ContractViolation(f"eps shape {tuple(eps.shape)} != z shape {tuple(z_prev.shape)}")
    alpha = s.gather(s.alphas, t, z_prev)
    beta = s.gather(s.betas, t, z_prev)
    return alpha.sqrt() * z_prev + beta.sqrt() * eps


def predict_x0(s: NoiseSchedule, z_t: torch.Tensor, t, eps_hat: torch.Tensor) -> torch.Tensor:
    """Invert the closed form for z0 given a noise estimate"""
    alpha_bar = s.gather(s.alpha_bars, t, z_t)
    return (z_t - (1.0 - alpha_bar).sqrt() * eps_hat) / alpha_bar.sqrt()


def sample_timesteps(s: NoiseSchedule, batch: int, generator: torch.Generator | None = None) -> torch.Tensor:
    return torch.randint(1, s.T + 1, (batch,), generator=generator)


def diffusion_loss(s: NoiseSchedule, denoiser: Denoiser, z0: torch.Tensor, conditions=None,
                   generator: torch.Generator | None = None, t: torch.Tensor | None = None,
                   eps: torch.Tensor | None = None) -> torch.Tensor:
    """
    Mean squared error between the injected and the predicted noise

    Unconditional pixel- or latent-space training passes conditions=None;
    conditional training passes a ConditionSet. t and eps are drawn from
    `generator` unless given explicitly.

    Returns:
        torch.Tensor: Scalar loss, averaged over elements and batch

    Example:
        >>> loss = diffusion_loss(schedule, lambda z, t, c: torch.zeros_like(z), z0)
    """
    if not torch.isfinite(z0).all():
        raise ContractViolation("z0 must be finite")
    if t is None:
        t = sample_timesteps(s, z0.shape[0], generator)
    if eps is None:
        eps = torch.randn(z0.shape, generator=generator, dtype=z0.dtype).to(z0.device)
    z_t = forward_diffuse(s, z0, t, eps)
    eps_hat = denoiser(z_t, t, conditions)
    if eps_hat.shape != eps.shape:
        raise ContractViolation(f"Denoiser returned shape {tuple(eps_hat.shape)}, expected {tuple(eps.shape)}")
    return (eps - eps_hat).pow(2).mean()
