"""
Metrics Report
Aggregated PSNR / SSIM / Pixel-MSE / tLP with the published scaling conventions
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from core.frames import VideoClip
from metrics.perceptual import ConvFeatureDistance
from metrics.quality import psnr, ssim
from metrics.temporal import TLP_MODES, pixel_mse_series, tlp_series
from utils.errors import ConfigError, ContractViolation, DataError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
PIXEL_MSE_SCALE = 1000.0
TLP_SCALE = 100.0


@dataclass
class MetricsReport:
    """Scaled metrics of one generated clip against its ground truth"""

    psnr_mean: float
    ssim_mean: float
    pixel_mse_temporal: float
    tlp: float
    tlp_referenced: float
    tlp_unreferenced: float
    lpips_proxy_mean: float
    frames: int
    tlp_mode: str = 'unreferenced'
    perceptual_seed: int = 0
    alignment: str = 'identity'
    fid: float | None = None
    lse_c: float | None = None
    lse_d: float | None = None
    config_hash: str | None = None
    dataset_hash: str | None = None
    schema_version: int = SCHEMA_VERSION
    series: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n'

    @classmethod
    def from_dict(cls, data: dict) -> 'MetricsReport':
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> 'MetricsReport':
        return cls.from_dict(json.loads(text))

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        return path

    @classmethod
    def read(cls, path) -> 'MetricsReport':
        path = Path(path)
        if not path.is_file():
            raise DataError(f"Metrics report not found: {path}")
        return cls.from_json(path.read_text())


def evaluate_video(gen: VideoClip, gt: VideoClip, config=None, pd=None) -> MetricsReport:
    """
    Score a generated clip against ground truth

    Args:
        gen: Generated clip
        gt: Ground-truth clip of equal length and frame shape
        config: Supplies tlp_mode, perceptual_seed and the hashes (optional)
        pd: Perceptual distance; defaults to ConvFeatureDistance(perceptual_seed)

    Returns:
        MetricsReport: Pixel-MSE scaled x1000, tLP x100

    Raises:
        ContractViolation: Length or shape mismatch
        InsufficientFramesError: Fewer than two frames
    """
    if len(gen) != len(gt):
        raise ContractViolation(f"Frame counts differ: generated {len(gen)}, ground truth {len(gt)}")
    if len(gen) and gen.frames[0].shape != gt.frames[0].shape:
        raise ContractViolation(f"Frame shapes differ: {gen.frames[0].shape} vs {gt.frames[0].shape}")
    mode = getattr(config, 'tlp_mode', 'unreferenced')
    if mode not in TLP_MODES:
        raise ConfigError(f"Unknown tLP mode '{mode}', expected one of {TLP_MODES}")
    seed = getattr(config, 'perceptual_seed', 0)
    pd = pd if pd is not None else ConvFeatureDistance(seed)

    psnr_values = [psnr(a, b) for a, b in zip(gen.frames, gt.frames)]
    ssim_values = [ssim(a, b) for a, b in zip(gen.frames, gt.frames)]
    lpips_values = [pd(a, b) for a, b in zip(gen.frames, gt.frames)]
    mse_values = pixel_mse_series(gen) * PIXEL_MSE_SCALE
    tlp_unref = tlp_series(gen, None, pd) * TLP_SCALE
    tlp_ref = tlp_series(gen, gt, pd) * TLP_SCALE
    selected = tlp_ref if mode == 'referenced' else tlp_unref

    report = MetricsReport(
        psnr_mean=float(np.mean(psnr_values)),
        ssim_mean=float(np.mean(ssim_values)),
        pixel_mse_temporal=float(mse_values.mean()),
        tlp=float(selected.mean()),
        tlp_referenced=float(tlp_ref.mean()),
        tlp_unreferenced=float(tlp_unref.mean()),
        lpips_proxy_mean=float(np.mean(lpips_values)),
        frames=len(gen),
        tlp_mode=mode,
        perceptual_seed=getattr(pd, 'seed', seed),
        config_hash=config.config_hash() if config is not None else None,
        dataset_hash=config.dataset_hash() if config is not None else None,
        series={
            'psnr': [float(v) for v in psnr_values],
            'ssim': [float(v) for v in ssim_values],
            'lpips_proxy': [float(v) for v in lpips_values],
            'pixel_mse': [float(v) for v in mse_values],
            'tlp': [float(v) for v in selected],
        },
    )
    logger.info(f"PSNR {report.psnr_mean:.2f} dB, SSIM {report.ssim_mean:.4f}, "
                f"Pixel-MSE {report.pixel_mse_temporal:.3f}, tLP {report.tlp:.3f}")
    return report


TABLE_HEADER = '| Setting | tLP ×100 ↓ | Pixel-MSE ×1000 ↓ |\n|---|---|---|'


def table_row(name: str, report) -> str:
    """One Table-2-style row; `report` is a MetricsReport or a dict with tlp/pixel_mse_temporal"""
    data = report.to_dict() if isinstance(report, MetricsReport) else report
    return f"| {name} | {data['tlp']:.3f} | {data['pixel_mse_temporal']:.3f} |"


def format_table(rows: dict) -> str:
    return '\n'.join([TABLE_HEADER] + [table_row(name, report) for name, report in rows.items()])
