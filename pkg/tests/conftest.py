"""
Shared fixtures: tiny configurations, seeded generators and an on-disk corpus
"""

import numpy as np
import pytest
import torch

from app import main
from config import Config
from synthdata.dataset import make_dataset

# Small enough for every model to train in seconds on a CPU
TINY = {
    'height': 32,
    'width': 32,
    'n_identities': 2,
    'clips_per_identity': 2,
    'clip_len_frames': 12,
    'val_fraction': 0.5,
    'n_mels': 20,
    'content_dim': 8,
    'identity_dim': 8,
    'audio_window': 3,
    'a2l_hidden': 8,
    'a2l_chunk': 6,
    'a2l_epochs': 2,
    'a2l_batch_size': 2,
    'ae_base_channels': 8,
    'ae_epochs': 1,
    'ae_batch_size': 8,
    'diffusion_steps': 20,
    'ddim_steps': 5,
    'unet_base_channels': 8,
    'landmark_dim': 16,
    'attention_heads': 4,
    'l2v_steps': 3,
    'l2v_batch_size': 4,
    'checkpoint_every': 1,
}


def tiny_config(tmp_path=None, **changes) -> Config:
    """Desk preset shrunk to TINY, isolated from the caller's environment"""
    values = dict(TINY)
    values.update(changes)
    if tmp_path is not None:
        values.setdefault('data_dir', tmp_path / 'corpus')
        values.setdefault('run_dir', tmp_path / 'run')
    return Config.load(preset='desk', environ={}, **values)


def write_config_file(path, tiny=True, **changes):
    """TINY (or the plain desk preset) as a KEY=value config file for CLI tests"""
    values = dict(TINY) if tiny else {'preset': 'desk'}
    values.update(changes)
    path.write_text(''.join(f"{key.upper()}={value}\n" for key, value in values.items()))
    return path


@pytest.fixture
def config(tmp_path):
    return tiny_config(tmp_path)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def generator():
    return torch.Generator().manual_seed(1234)


@pytest.fixture(scope='session')
def tiny_corpus(tmp_path_factory):
    """(root, config) of a 2 identity x 2 clip corpus rendered once per session"""
    root = tmp_path_factory.mktemp('corpus')
    cfg = tiny_config(data_dir=root, run_dir=root.parent / 'corpus_run')
    make_dataset(root, cfg.n_identities, cfg.clips_per_identity, cfg.clip_len_frames, cfg)
    return root, cfg


class Workspace:
    """Config file plus data and run directories under one temporary root"""

    def __init__(self, root, tiny=True, **changes):
        self.root = root
        self.config = write_config_file(root / 'run.env', tiny=tiny, **changes)
        self.data_dir = root / 'corpus'
        self.run_dir = root / 'run'

    def __call__(self, *argv) -> int:
        return main(['--config', str(self.config), '--data-dir', str(self.data_dir),
                     '--run-dir', str(self.run_dir), *[str(a) for a in argv]])

    def clip(self, name='id_000/clip_001'):
        return self.data_dir / name

    def load_config(self) -> Config:
        return Config.load(self.config, environ={}, data_dir=self.data_dir, run_dir=self.run_dir)


@pytest.fixture(scope='session')
def desk_run(tmp_path_factory):
    """Desk-preset corpus with trained ae, a2l and l2v checkpoints; only slow tests request it"""
    ws = Workspace(tmp_path_factory.mktemp('desk'), tiny=False, ablation_repeats=5)
    assert ws('synth-data') == 0
    for phase in ('ae', 'a2l', 'l2v'):
        assert ws('train', phase) == 0
    return ws
