"""
Per-Frame Quality Metrics
PSNR and Gaussian-window SSIM on [0, 1] frames
"""

import numpy as np
from scipy.signal import convolve2d

from utils.errors import ConfigError, ContractViolation

PSNR_CAP = 100.0
SSIM_SIGMA = 1.5


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ContractViolation(f"Frame shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """
    10 log10(1 / MSE) in dB at unit peak; identical frames return PSNR_CAP

    Example:
        >>> psnr(np.zeros((4, 4, 3)), np.full((4, 4, 3), 1 / 255))
        48.1308...
    """
    a, b = _pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(float(10.0 * np.log10(1.0 / mse)), PSNR_CAP)


def gaussian_window(size: int, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalised size x size Gaussian kernel"""
    coords = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(coords ** 2) / (2.0 * sigma ** 2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def ssim_map(a: np.ndarray, b: np.ndarray, window: int = 11, k1: float = 0.01, k2: float = 0.03) -> np.ndarray:
    """Local SSIM of two single-channel images over the valid window positions"""
    kernel = gaussian_window(window)

    def filt(x):
        return convolve2d(x, kernel, mode='valid')

    c1, c2 = k1 ** 2, k2 ** 2
    mu_a, mu_b = filt(a), filt(b)
    var_a = filt(a * a) - mu_a * mu_a
    var_b = filt(b * b) - mu_b * mu_b
    cov = filt(a * b) - mu_a * mu_b
    numerator = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    denominator = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return numerator / denominator


def ssim(a: np.ndarray, b: np.ndarray, window: int = 11, k1: float = 0.01, k2: float = 0.03) -> float:
    """
    Mean local SSIM, averaged over channels (C1 = k1², C2 = k2² at unit range)

    Raises:
        ConfigError: Even window or frame smaller than the window
        ContractViolation: Shape mismatch
    """
    a, b = _pair(a, b)
    if window < 1 or window % 2 == 0:
        raise ConfigError(f"SSIM window must be odd and positive, got {window}")
    if a.shape[0] < window or a.shape[1] < window:
        raise ConfigError(f"Frame {a.shape[0]}x{a.shape[1]} is smaller than the {window}x{window} SSIM window")
    if a.ndim == 2:
        a, b = a[..., None], b[..., None]
    return float(np.mean([ssim_map(a[..., c], b[..., c], window, k1, k2).mean() for c in range(a.shape[2])]))
