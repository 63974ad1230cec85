"""
Artifact Guard Middleware
Decorators and context managers protecting command entry points
"""

import logging
import os
from contextlib import contextmanager
from functools import wraps
from pathlib import Path

from l2v.components import l2v_checkpoint_name
from synthdata.dataset import MANIFEST_NAME
from utils.errors import DataError, DependencyError

logger = logging.getLogger(__name__)

LOCK_NAME = '.lock'

# How each named artifact is located from a run configuration
ARTIFACTS = {
    'dataset': lambda config: Path(config.data_dir) / MANIFEST_NAME,
    'a2l': lambda config: Path(config.run_dir) / 'checkpoints' / 'a2l.pt',
    'ae': lambda config: Path(config.run_dir) / 'checkpoints' / 'ae.pt',
    'l2v': lambda config: Path(config.run_dir) / 'checkpoints' / l2v_checkpoint_name(config.ablation),
}


def artifact_path(config, name: str) -> Path:
    if name not in ARTIFACTS:
        raise KeyError(f"Unknown artifact '{name}'")
    return ARTIFACTS[name](config)


def check_artifacts(config, names) -> dict:
    """
    Resolve artifacts and fail listing every one that is missing

    Returns:
        dict: name -> Path of every requested artifact

    Raises:
        DependencyError: At least one artifact does not exist
    """
    paths = {name: artifact_path(config, name) for name in names}
    missing = [f"{name} ({path})" for name, path in paths.items() if not path.is_file()]
    if missing:
        raise DependencyError(f"Missing prerequisite artifacts: {', '.join(missing)}", missing=missing)
    return paths


def requires_artifacts(*names):
    """
    Decorator refusing to run a command before its inputs exist

    Usage:
        @requires_artifacts('dataset', 'ae')
        def train_l2v_phase(args, config):
            ...

    The wrapped function is called as f(args, config); the resolved paths
    are available as args.artifacts.

    Raises:
        DependencyError: Naming every missing artifact
    """
    def decorator(f):
        @wraps(f)
        def decorated(args, config, *rest, **kwargs):
            args.artifacts = check_artifacts(config, names)
            return f(args, config, *rest, **kwargs)

        decorated.required_artifacts = names
        return decorated

    return decorator


@contextmanager
def output_lock(directory):
    """
    Hold an exclusive lockfile in an output directory

    Usage:
        with output_lock(args.out):
            write_frame_dir(args.out, clip)

    Raises:
        DataError: The directory cannot be created or another writer holds the lock
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataError(f"Cannot create output directory {directory}: {e}")

    lock = directory / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise DataError(f"Output directory {directory} is locked by another writer (remove {lock} if stale)")
    except OSError as e:
        raise DataError(f"Cannot lock output directory {directory}: {e}")

    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        logger.debug(f"Locked {directory}")
        yield directory
    finally:
        lock.unlink(missing_ok=True)
