"""
Embedding Cache
.npy arrays with a JSON sidecar (shape, dtype, hop, config hash)
"""

import json
import logging
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)


def save_embedding(path, values: np.ndarray, hop: float | None, config_hash: str) -> Path:
    """Write values to `path` (.npy) and its sidecar `path.json`"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.save(path, values, allow_pickle=False)
    sidecar = {
        'shape': list(values.shape),
        'dtype': str(values.dtype),
        'hop': hop,
        'config_hash': config_hash,
    }
    Path(str(path) + '.json').write_text(json.dumps(sidecar, indent=2, sort_keys=True) + '\n')
    return path


def load_embedding(path, config_hash: str):
    """
    Return the cached array, or None when missing or written under another config

    Example:
        >>> cached = load_embedding('cache/content.npy', feature_hash)
        >>> if cached is None: ...
    """
    path = Path(path)
    sidecar_path = Path(str(path) + '.json')
    if not path.is_file() or not sidecar_path.is_file():
        return None
    sidecar = json.loads(sidecar_path.read_text())
    if sidecar.get('config_hash') != config_hash:
        logger.info(f"⏳ Stale embedding cache {path.name}, recomputing")
        return None
    values = np.load(path, allow_pickle=False)
    if list(values.shape) != sidecar.get('shape'):
        logger.warning(f"⚠️ Embedding cache {path.name} shape mismatch, recomputing")
        return None
    return values
