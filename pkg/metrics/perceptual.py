"""
Perceptual Distance
Untrained, seeded conv features compared LPIPS-style (channel-normalised, equal layer weights)
"""

from typing import Protocol

import numpy as np
import torch
from torch import nn

from core.frames import frames_to_tensor
from utils.errors import ContractViolation

DEFAULT_SEED = 0
LAYER_CHANNELS = (16, 32, 32)


class PerceptualDistance(Protocol):
    def __call__(self, a: np.ndarray, b: np.ndarray) -> float:
        ...


class ConvFeatureDistance:
    """
    Distance between frames in the feature space of a fixed random conv stack

    d(a, a) = 0, symmetric, deterministic for a given seed.

    Example:
        >>> pd = ConvFeatureDistance(seed=0)
        >>> pd(frame, frame)
        0.0
    """

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = seed
        generator = torch.Generator().manual_seed(seed)
        layers = []
        in_channels = 3
        for i, out_channels in enumerate(LAYER_CHANNELS):
            conv = nn.Conv2d(in_channels, out_channels, 3, stride=1 if i == 0 else 2, padding=1)
            fan_in = in_channels * 9
            with torch.no_grad():
                conv.weight.copy_(torch.randn(conv.weight.shape, generator=generator) * np.sqrt(2.0 / fan_in))
                conv.bias.zero_()
            layers.append(conv.double())
            in_channels = out_channels
        self.layers = layers

    @torch.no_grad()
    def features(self, frame: np.ndarray) -> list:
        x = frames_to_tensor(frame, torch.float64) * 2.0 - 1.0
        out = []
        for conv in self.layers:
            x = torch.relu(conv(x))
            out.append(x / (x.pow(2).sum(dim=1, keepdim=True).sqrt() + 1e-10))
        return out

    def __call__(self, a: np.ndarray, b: np.ndarray) -> float:
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape != b.shape:
            raise ContractViolation(f"Frame shapes differ: {a.shape} vs {b.shape}")
        distance = 0.0
        for fa, fb in zip(self.features(a), self.features(b)):
            distance += float((fa - fb).pow(2).sum(dim=1).mean())
        return distance
