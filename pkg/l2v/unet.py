"""
Conditional Denoising UNet
Two-resolution time-conditional UNet; the landmark embedding enters through cross-attention at the bottleneck
"""

import math
from dataclasses import asdict, dataclass

import torch
import torch.nn.functional as F
from torch import nn

from l2v.autoencoder import norm_groups
from l2v.conditions import ConditionSet, check_ablation
from utils.errors import ContractViolation


def timestep_embedding(t: torch.Tensor, dim: int, max_period: float = 10000.0) -> torch.Tensor:
    """Sinusoidal embedding of 1-based integer timesteps, (B,) -> (B, dim)"""
    half = dim // 2
    freqs = torch.exp(-math.log(max_period) * torch.arange(half, device=t.device, dtype=torch.float64) / max(half, 1))
    args = t.to(torch.float64)[:, None] * freqs[None]
    embedding = torch.cat([torch.cos(args), torch.sin(args)], dim=-1)
    if dim % 2:
        embedding = F.pad(embedding, (0, 1))
    return embedding


@dataclass(frozen=True)
class UNetHyperParams:
    latent_channels: int = 3
    base_channels: int = 32
    landmark_dim: int = 64
    heads: int = 4
    visual_landmarks: bool = True

    @classmethod
    def from_config(cls, config, ablation: str | None = None) -> 'UNetHyperParams':
        ablation = config.ablation if ablation is None else ablation
        check_ablation(ablation)
        return cls(
            latent_channels=config.latent_channels,
            base_channels=config.unet_base_channels,
            landmark_dim=config.landmark_dim,
            heads=config.attention_heads,
            visual_landmarks=ablation != 'no_visual',
        )

    @property
    def in_channels(self) -> int:
        return self.latent_channels * (3 + int(self.visual_landmarks))


class ResBlock(nn.Module):
    def __init__(self, in_channels: int, out_channels: int, time_dim: int):
        super().__init__()
        self.norm1 = nn.GroupNorm(norm_groups(in_channels), in_channels)
        self.conv1 = nn.Conv2d(in_channels, out_channels, 3, padding=1)
        self.time = nn.Linear(time_dim, out_channels)
        self.norm2 = nn.GroupNorm(norm_groups(out_channels), out_channels)
        self.conv2 = nn.Conv2d(out_channels, out_channels, 3, padding=1)
        self.skip = nn.Conv2d(in_channels, out_channels, 1) if in_channels != out_channels else nn.Identity()

    def forward(self, x, t_emb):
        h = self.conv1(F.silu(self.norm1(x)))
        h = h + self.time(F.silu(t_emb))[:, :, None, None]
        h = self.conv2(F.silu(self.norm2(h)))
        return h + self.skip(x)


class CrossAttention(nn.Module):
    """
    Spatial features attend to a single context token

    Queries come from the normalised feature map, keys and values from the
    landmark embedding. Called with context=None the block is skipped.
    """

    def __init__(self, channels: int, context_dim: int, heads: int):
        super().__init__()
        self.heads = heads if channels % heads == 0 else 1
        self.norm = nn.GroupNorm(norm_groups(channels), channels)
        self.to_q = nn.Linear(channels, channels)
        self.to_k = nn.Linear(context_dim, channels)
        self.to_v = nn.Linear(context_dim, channels)
        self.proj = nn.Linear(channels, channels)

    def forward(self, x: torch.Tensor, context: torch.Tensor | None) -> torch.Tensor:
        if context is None:
            return x
        b, c, h, w = x.shape
        tokens = self.norm(x).flatten(2).transpose(1, 2)                # (B, HW, C)
        context = context.unsqueeze(1) if context.dim() == 2 else context  # (B, 1, D_l)
        head_dim = c // self.heads

        def split(t):
            return t.reshape(b, t.shape[1], self.heads, head_dim).transpose(1, 2)

        q, k, v = split(self.to_q(tokens)), split(self.to_k(context)), split(self.to_v(context))
        weights = torch.softmax(q @ k.transpose(-1, -2) / math.sqrt(head_dim), dim=-1)
        out = (weights @ v).transpose(1, 2).reshape(b, h * w, c)
        return x + self.proj(out).transpose(1, 2).reshape(b, c, h, w)


class DenoisingNet(nn.Module):
    """
    ε_θ(z_t, t, conditions) on latents of shape (B, c_lat, h, w), h and w even

    The spatial input is the channel concatenation [z_t, z_l?, z_p, z_id].
    """

    def __init__(self, params: UNetHyperParams):
        super().__init__()
        self.params = params
        base = params.base_channels
        time_dim = 4 * base
        self.time_mlp = nn.Sequential(nn.Linear(base, time_dim), nn.SiLU(), nn.Linear(time_dim, time_dim))

        self.stem = nn.Conv2d(params.in_channels, base, 3, padding=1)
        self.down1 = ResBlock(base, base, time_dim)
        self.downsample = nn.Conv2d(base, base, 3, stride=2, padding=1)
        self.down2 = ResBlock(base, 2 * base, time_dim)
        self.mid1 = ResBlock(2 * base, 2 * base, time_dim)
        self.attention = CrossAttention(2 * base, params.landmark_dim, params.heads)
        self.mid2 = ResBlock(2 * base, 2 * base, time_dim)
        self.up2 = ResBlock(4 * base, 2 * base, time_dim)
        self.upsample = nn.Conv2d(2 * base, base, 3, padding=1)
        self.up1 = ResBlock(2 * base, base, time_dim)
        self.out_norm = nn.GroupNorm(norm_groups(base), base)
        self.out = nn.Conv2d(base, params.latent_channels, 3, padding=1)

    def spatial_input(self, z_t: torch.Tensor, conditions: ConditionSet) -> torch.Tensor:
        if conditions is None:
            raise ContractViolation("DenoisingNet needs a ConditionSet")
        if (conditions.z_l is not None) != self.params.visual_landmarks:
            state = 'present' if conditions.z_l is not None else 'absent'
            raise ContractViolation(f"z_l is {state} but the network was built with visual_landmarks={self.params.visual_landmarks}")
        if conditions.z_p.shape != z_t.shape:
            raise ContractViolation(f"Condition latents {tuple(conditions.z_p.shape)} do not match z_t {tuple(z_t.shape)}")
        return torch.cat([z_t] + conditions.spatial(), dim=1)

    def forward(self, z_t: torch.Tensor, t: torch.Tensor, conditions: ConditionSet) -> torch.Tensor:
        if z_t.shape[2] % 2 or z_t.shape[3] % 2:
            raise ContractViolation(f"Latent size {z_t.shape[2]}x{z_t.shape[3]} must be even")
        if not torch.is_tensor(t) or t.dim() == 0:
            t = torch.full((z_t.shape[0],), int(t), dtype=torch.long, device=z_t.device)
        x = self.spatial_input(z_t, conditions)
        t_emb = self.time_mlp(timestep_embedding(t, self.params.base_channels).to(z_t.dtype))

        h1 = self.down1(self.stem(x), t_emb)
        h2 = self.down2(self.downsample(h1), t_emb)
        m = self.mid1(h2, t_emb)
        m = self.attention(m, conditions.C_l)
        m = self.mid2(m, t_emb)
        u = self.up2(torch.cat([m, h2], dim=1), t_emb)
        u = self.upsample(F.interpolate(u, scale_factor=2, mode='nearest'))
        u = self.up1(torch.cat([u, h1], dim=1), t_emb)
        return self.out(F.silu(self.out_norm(u)))

    def attention_parameters(self) -> dict:
        return dict(self.attention.named_parameters())

    def hyperparams(self) -> dict:
        return asdict(self.params)
