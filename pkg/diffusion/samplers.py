"""
Reverse Samplers
DDIM over a strided timestep subsequence and the full ancestral DDPM chain
"""

import math

import torch
from tqdm import tqdm

from diffusion.process import Denoiser, predict_x0
from diffusion.schedule import NoiseSchedule
from utils.errors import ConfigError, ContractViolation


def ddim_timesteps(T: int, steps: int) -> list:
    """
    Descending subsequence of `steps` timesteps starting at T

    Stride is ceil(T / steps); when that would run below 1 the stride
    falls back to T // steps.

    Example:
        >>> ddim_timesteps(1000, 200)[:3]
        [1000, 995, 990]
    """
    if not 1 <= steps <= T:
        raise ConfigError(f"DDIM steps must lie in [1, {T}], got {steps}")
    stride = math.ceil(T / steps)
    if T - (steps - 1) * stride < 1:
        stride = T // steps
    return [T - k * stride for k in range(steps)]


def _timestep_tensor(t: int, z: torch.Tensor) -> torch.Tensor:
    return torch.full((z.shape[0],), t, dtype=torch.long, device=z.device)


def _predict(denoiser: Denoiser, z: torch.Tensor, t: int, conditions) -> torch.Tensor:
    eps = denoiser(z, _timestep_tensor(t, z), conditions)
    if eps.shape != z.shape:
        raise ContractViolation(f"Denoiser returned shape {tuple(eps.shape)}, expected {tuple(z.shape)}")
    return eps


@torch.no_grad()
def ddim_sample(s: NoiseSchedule, denoiser: Denoiser, conditions, steps: int, eta: float, z_T: torch.Tensor,
                generator: torch.Generator | None = None, progress: bool = False) -> torch.Tensor:
    """
    Run DDIM from z_T down to an estimate of z_0

    Args:
        s: Noise schedule the denoiser was trained with
        denoiser: ε-predictor
        conditions: Passed through to the denoiser (may be None)
        steps: Length of the timestep subsequence
        eta: 0 for the deterministic sampler, 1 for DDPM-equivalent variance
        z_T: Starting noise
        generator: Source of the fresh noise used when eta > 0
        progress: Show a tqdm bar

    Returns:
        torch.Tensor: z_0 estimate with z_T's shape
    """
    if eta < 0:
        raise ConfigError(f"eta must be non-negative, got {eta}")
    if not torch.isfinite(z_T).all():
        raise ContractViolation("z_T must be finite")
    timesteps = ddim_timesteps(s.T, steps)
    z = z_T
    for i, t in enumerate(tqdm(timesteps, desc='DDIM', leave=False, disable=not progress)):
        eps = _predict(denoiser, z, t, conditions)
        alpha_bar = s.gather(s.alpha_bars, t, z)
        if i + 1 < len(timesteps):
            alpha_bar_prev = s.gather(s.alpha_bars, timesteps[i + 1], z)
        else:
            alpha_bar_prev = torch.ones_like(alpha_bar)
        x0 = predict_x0(s, z, t, eps)
        sigma = eta * ((1 - alpha_bar_prev) / (1 - alpha_bar) * (1 - alpha_bar / alpha_bar_prev)).sqrt()
        z = alpha_bar_prev.sqrt() * x0 + (1 - alpha_bar_prev - sigma ** 2).clamp(min=0).sqrt() * eps
        if eta > 0 and float(sigma) > 0:
            z = z + sigma * torch.randn(z.shape, generator=generator, dtype=z.dtype).to(z.device)
    return z


@torch.no_grad()
def ddpm_sample(s: NoiseSchedule, denoiser: Denoiser, conditions, z_T: torch.Tensor,
                generator: torch.Generator | None = None, progress: bool = False) -> torch.Tensor:
    """Ancestral sampling through all T steps with the posterior variance β̃_t"""
    z = z_T
    for t in tqdm(range(s.T, 0, -1), desc='DDPM', leave=False, disable=not progress):
        eps = _predict(denoiser, z, t, conditions)
        alpha = s.gather(s.alphas, t, z)
        beta = s.gather(s.betas, t, z)
        alpha_bar = s.gather(s.alpha_bars, t, z)
        mean = (z - beta / (1 - alpha_bar).sqrt() * eps) / alpha.sqrt()
        if t > 1:
            alpha_bar_prev = s.gather(s.alpha_bars, t - 1, z)
            variance = (1 - alpha_bar_prev) / (1 - alpha_bar) * beta
            z = mean + variance.sqrt() * torch.randn(z.shape, generator=generator, dtype=z.dtype).to(z.device)
        else:
            z = mean
    return z
