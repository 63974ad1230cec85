"""
Artifact Validation Utilities
Schema checks for the JSON artifacts the commands read and write
"""

import math
import re

from metrics.report import SCHEMA_VERSION
from metrics.temporal import TLP_MODES

HASH_PATTERN = re.compile(r'^[0-9a-f]{64}$')

REPORT_FLOAT_FIELDS = (
    'psnr_mean', 'ssim_mean', 'pixel_mse_temporal', 'tlp',
    'tlp_referenced', 'tlp_unreferenced', 'lpips_proxy_mean',
)
REPORT_OPTIONAL_FLOAT_FIELDS = ('fid', 'lse_c', 'lse_d')
REPORT_SERIES = ('psnr', 'ssim', 'lpips_proxy', 'pixel_mse', 'tlp')


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate_hash(value, name: str = 'hash', required: bool = False) -> tuple[bool, str]:
    """
    Validate a SHA-256 hex digest

    Args:
        value: Candidate digest (None allowed unless required)
        name (str): Field name used in the message
        required (bool): Whether None is an error

    Returns:
        tuple: (is_valid, error_message)

    Example:
        >>> validate_hash('ab' * 32)
        (True, None)
        >>> validate_hash('xyz', 'config_hash')
        (False, "Field 'config_hash' must be a 64-character hex SHA-256 digest")
    """
    if value is None:
        return (False, f"Field '{name}' is required") if required else (True, None)
    if not isinstance(value, str) or not HASH_PATTERN.match(value):
        return False, f"Field '{name}' must be a 64-character hex SHA-256 digest"
    return True, None


def validate_metrics_report(data: dict) -> tuple[bool, str]:
    """
    Validate a MetricsReport JSON document against schema version 1

    Args:
        data (dict): Parsed report

    Returns:
        tuple: (is_valid, error_message)

    Example:
        >>> validate_metrics_report(evaluate_video(gen, gt).to_dict())
        (True, None)
        >>> validate_metrics_report({'tlp': 0.5})
        (False, "Field 'schema_version' is required")
    """
    if not isinstance(data, dict):
        return False, "Report must be a JSON object"

    if 'schema_version' not in data:
        return False, "Field 'schema_version' is required"
    if data['schema_version'] != SCHEMA_VERSION:
        return False, f"Unsupported schema_version {data['schema_version']!r}, expected {SCHEMA_VERSION}"

    for name in REPORT_FLOAT_FIELDS:
        if name not in data:
            return False, f"Field '{name}' is required"
        if not _is_number(data[name]):
            return False, f"Field '{name}' must be a finite number"

    for name in REPORT_OPTIONAL_FLOAT_FIELDS:
        if data.get(name) is not None and not _is_number(data[name]):
            return False, f"Field '{name}' must be a finite number or null"

    frames = data.get('frames')
    if not isinstance(frames, int) or isinstance(frames, bool) or frames < 2:
        return False, "Field 'frames' must be an integer of at least 2"

    if data.get('tlp_mode') not in TLP_MODES:
        return False, f"Field 'tlp_mode' must be one of {', '.join(TLP_MODES)}"

    if not 0.0 <= data['psnr_mean'] <= 100.0:
        return False, "Field 'psnr_mean' must lie in [0, 100] dB"
    if not -1.0 <= data['ssim_mean'] <= 1.0:
        return False, "Field 'ssim_mean' must lie in [-1, 1]"
    for name in ('pixel_mse_temporal', 'tlp', 'tlp_referenced', 'tlp_unreferenced', 'lpips_proxy_mean'):
        if data[name] < 0:
            return False, f"Field '{name}' must be non-negative"

    for name in ('config_hash', 'dataset_hash'):
        is_valid, error = validate_hash(data.get(name), name)
        if not is_valid:
            return False, error

    series = data.get('series', {})
    if not isinstance(series, dict):
        return False, "Field 'series' must be an object"
    for name in REPORT_SERIES:
        values = series.get(name)
        if values is None:
            continue
        expected = frames if name in ('psnr', 'ssim', 'lpips_proxy') else frames - 1
        if not isinstance(values, list) or len(values) != expected:
            return False, f"Series '{name}' must hold {expected} values"
        if not all(_is_number(v) for v in values):
            return False, f"Series '{name}' must hold finite numbers"

    return True, None


def validate_manifest(data: dict) -> tuple[bool, str]:
    """
    Validate a synthetic corpus manifest

    Args:
        data (dict): Parsed manifest.json

    Returns:
        tuple: (is_valid, error_message)
    """
    if not isinstance(data, dict):
        return False, "Manifest must be a JSON object"

    for name in ('format_version', 'master_seed', 'height', 'width', 'fps', 'sample_rate', 'clips'):
        if name not in data:
            return False, f"Field '{name}' is required"

    is_valid, error = validate_hash(data.get('dataset_hash'), 'dataset_hash', required=True)
    if not is_valid:
        return False, error

    clips = data['clips']
    if not isinstance(clips, list) or not clips:
        return False, "Field 'clips' must be a non-empty list"

    seen = set()
    for entry in clips:
        for name in ('identity', 'clip', 'path', 'split', 'frames'):
            if name not in entry:
                return False, f"Clip entry is missing '{name}'"
        if entry['split'] not in ('train', 'val'):
            return False, f"Clip {entry['path']} has unknown split '{entry['split']}'"
        if entry['path'] in seen:
            return False, f"Clip {entry['path']} is listed twice"
        seen.add(entry['path'])

    return True, None


def validate_experiment_manifest(data: dict) -> tuple[bool, str]:
    """
    Validate an experiment.json document

    Args:
        data (dict): Parsed experiment manifest

    Returns:
        tuple: (is_valid, error_message)
    """
    if not isinstance(data, dict):
        return False, "Experiment manifest must be a JSON object"

    is_valid, error = validate_hash(data.get('config_hash'), 'config_hash', required=True)
    if not is_valid:
        return False, error

    for name in ('checkpoints', 'reports', 'outputs'):
        value = data.get(name, {})
        if not isinstance(value, dict) or not all(isinstance(v, str) for v in value.values()):
            return False, f"Field '{name}' must map names to paths"

    dataset_manifest = data.get('dataset_manifest')
    if dataset_manifest is not None and not isinstance(dataset_manifest, str):
        return False, "Field 'dataset_manifest' must be a path or null"

    return True, None
