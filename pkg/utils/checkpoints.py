"""
Checkpoint Utilities
Versioned torch archives with the config hash of the run that wrote them
"""

import logging
from pathlib import Path

import torch

from utils.errors import DataError, DependencyError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def save_checkpoint(path, component: str, state_dict: dict, config_hash: str, config: dict, **extras) -> Path:
    """
    Save a component checkpoint atomically

    Args:
        path: Destination file
        component: Component name ('a2l', 'ae', 'l2v', ...)
        state_dict: Model parameters
        config_hash: Hash of the run configuration
        config: Hyperparameters needed to rebuild the component
        **extras: Optimizer state, step counters, schedules, ...

    Returns:
        Path: The written checkpoint
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        'format_version': FORMAT_VERSION,
        'component': component,
        'config_hash': config_hash,
        'config': dict(config),
        'state_dict': state_dict,
    }
    payload.update(extras)
    tmp = path.with_suffix(path.suffix + '.tmp')
    torch.save(payload, tmp)
    tmp.replace(path)
    logger.info(f"✅ Saved {component} checkpoint to {path}")
    return path


def load_checkpoint(path, component: str) -> dict:
    """
    Load and check a checkpoint

    Raises:
        DependencyError: File does not exist
        DataError: Wrong component or unsupported format version
    """
    path = Path(path)
    if not path.is_file():
        raise DependencyError(f"Missing {component} checkpoint: {path}", missing=[str(path)])
    payload = torch.load(path, map_location='cpu', weights_only=False)
    if payload.get('format_version') != FORMAT_VERSION:
        raise DataError(f"Unsupported checkpoint format {payload.get('format_version')} in {path}")
    if payload.get('component') != component:
        raise DataError(f"{path} holds a '{payload.get('component')}' checkpoint, expected '{component}'")
    return payload
