"""
Evaluation suite: PSNR, SSIM, temporal Pixel-MSE and tLP with a pluggable perceptual distance
"""

from metrics.perceptual import ConvFeatureDistance, PerceptualDistance
from metrics.quality import PSNR_CAP, psnr, ssim
from metrics.report import MetricsReport, evaluate_video, format_table, table_row
from metrics.temporal import TLP_MODES, pixel_mse_temporal, tlp

__all__ = [
    'ConvFeatureDistance', 'MetricsReport', 'PSNR_CAP', 'PerceptualDistance', 'TLP_MODES', 'evaluate_video',
    'format_table', 'pixel_mse_temporal', 'psnr', 'ssim', 'table_row', 'tlp',
]
