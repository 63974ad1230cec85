"""
Experiment Manifest
experiment.json in the run directory: which artifacts belong to this configuration
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

from utils.errors import DataError
from utils.validators import validate_experiment_manifest

logger = logging.getLogger(__name__)

EXPERIMENT_NAME = 'experiment.json'


@dataclass
class ExperimentManifest:
    config_hash: str
    dataset_hash: str | None = None
    dataset_manifest: str | None = None
    checkpoints: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    @staticmethod
    def path_for(run_dir) -> Path:
        return Path(run_dir) / EXPERIMENT_NAME

    @classmethod
    def load(cls, config) -> 'ExperimentManifest':
        """
        Read the run's manifest, or start an empty one

        A manifest written under another config hash is discarded: its
        artifacts no longer describe this configuration.
        """
        path = cls.path_for(config.run_dir)
        fresh = cls(config.config_hash(), config.dataset_hash())
        if not path.is_file():
            return fresh
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise DataError(f"Corrupt experiment manifest {path}: {e}")
        is_valid, error = validate_experiment_manifest(data)
        if not is_valid:
            raise DataError(f"Invalid experiment manifest {path}: {error}")
        if data['config_hash'] != fresh.config_hash:
            logger.warning(f"⚠️ {path} belongs to config {data['config_hash'][:12]}, starting a new manifest")
            return fresh
        return cls(**{k: data.get(k, getattr(fresh, k)) for k in asdict(fresh)})

    def referenced(self) -> list:
        paths = [self.dataset_manifest] if self.dataset_manifest else []
        for group in (self.checkpoints, self.reports, self.outputs):
            paths += list(group.values())
        return paths

    def save(self, run_dir) -> Path:
        """
        Write experiment.json

        Raises:
            DataError: A referenced file does not exist
        """
        missing = [p for p in self.referenced() if not Path(p).exists()]
        if missing:
            raise DataError(f"Experiment manifest references missing files: {', '.join(missing)}")
        path = self.path_for(run_dir)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + '\n')
        return path


def record_artifact(config, group: str, name: str, path) -> Path:
    """Add one artifact to the run's experiment manifest and rewrite it"""
    manifest = ExperimentManifest.load(config)
    if group == 'dataset_manifest':
        manifest.dataset_manifest = str(path)
    else:
        getattr(manifest, group)[name] = str(path)
    return manifest.save(config.run_dir)
