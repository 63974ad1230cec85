"""
Configuration Management for the Talking Head Pipeline
Centralized run configuration: presets, config file, environment overrides
"""

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from dotenv import dotenv_values, load_dotenv

from utils.errors import ConfigError

# Load environment variables
load_dotenv()

ENV_PREFIX = 'TALKHEAD_'

ABLATION_MODES = ('full', 'no_visual', 'no_corr')
PRESET_NAMES = ('desk', 'paper')

# Fields that never enter the config hash (where things live, not what they are)
PATH_FIELDS = ('data_dir', 'run_dir')

# Fields that fully determine the synthetic corpus
DATASET_FIELDS = (
    'seed', 'n_identities', 'clips_per_identity', 'clip_len_frames',
    'height', 'width', 'fps', 'sample_rate', 'val_fraction',
)

PRESETS = {
    'desk': {
        'height': 64, 'width': 64,
        'content_dim': 32, 'identity_dim': 32,
        'a2l_hidden': 32, 'a2l_lr': 1e-3, 'a2l_epochs': 300,
        'ae_base_channels': 32, 'ae_epochs': 60,
        'diffusion_steps': 200, 'ddim_steps': 50,
        'unet_base_channels': 32, 'landmark_dim': 64, 'l2v_steps': 6000,
    },
    'paper': {
        'height': 256, 'width': 256,
        'content_dim': 256, 'identity_dim': 256,
        'a2l_hidden': 256, 'a2l_lr': 1e-4, 'a2l_epochs': 200,
        'ae_base_channels': 64, 'ae_epochs': 100,
        'diffusion_steps': 1000, 'ddim_steps': 200,
        'unet_base_channels': 128, 'landmark_dim': 256, 'l2v_steps': 200000,
    },
}


@dataclass
class Config:
    """Run configuration shared by every command"""

    # Run
    seed: int = 0
    preset: str = 'desk'
    device: str = 'cpu'
    log_level: str = 'INFO'
    workers: int = 1

    # Paths
    data_dir: Path = Path('data/corpus')
    run_dir: Path = Path('runs/default')

    # Synthetic corpus
    n_identities: int = 4
    clips_per_identity: int = 8
    clip_len_frames: int = 100
    height: int = 64
    width: int = 64
    fps: float = 25.0
    val_fraction: float = 0.25

    # Audio features
    sample_rate: int = 16000
    n_mels: int = 80
    window_seconds: float = 0.025
    hop_seconds: float = 0.010
    content_dim: int = 32
    identity_dim: int = 32
    audio_window: int = 9
    projection_seed: int = 1234

    # A2L
    a2l_hidden: int = 32
    a2l_lr: float = 1e-3
    a2l_batch_size: int = 16
    a2l_chunk: int = 25
    a2l_epochs: int = 300
    a2l_intermediate_weight: float = 0.5
    a2l_mode: str = 'joint'

    # Autoencoder
    ae_factor: int = 4
    latent_channels: int = 3
    ae_base_channels: int = 32
    ae_lr: float = 1e-3
    ae_epochs: int = 60
    ae_batch_size: int = 32
    ae_latent_penalty: float = 1e-4

    # Diffusion
    diffusion_steps: int = 200
    schedule_kind: str = 'linear'
    beta_start: float = 1e-4
    beta_end: float = 0.02
    ddim_steps: int = 50
    ddim_eta: float = 0.0

    # L2V
    unet_base_channels: int = 32
    landmark_dim: int = 64
    attention_heads: int = 4
    l2v_lr: float = 2e-4
    l2v_steps: int = 6000
    l2v_batch_size: int = 32
    ablation: str = 'full'

    # Generation / evaluation
    reference_loop: bool = True
    identity_frame_index: int = 0
    perceptual_seed: int = 0
    tlp_mode: str = 'unreferenced'
    ablation_repeats: int = 1
    checkpoint_every: int = 10

    @classmethod
    def load(cls, config_path=None, preset=None, seed=None, environ=None, **overrides):
        """
        Build a configuration from every source, lowest precedence first

        Args:
            config_path: Optional dotenv-style file of KEY=value lines
            preset: 'desk' or 'paper' (overrides the file and environment)
            seed: Master seed (overrides the file and environment)
            environ: Mapping used instead of os.environ (tests)
            **overrides: Field values applied last

        Returns:
            Config: Validated configuration

        Example:
            >>> cfg = Config.load(preset='paper')
            >>> cfg.content_dim
            256
        """
        environ = os.environ if environ is None else environ

        file_values = {}
        if config_path is not None:
            path = Path(config_path)
            if not path.is_file():
                raise ConfigError(f"Config file not found: {path}")
            file_values = {k.upper(): v for k, v in dotenv_values(path).items() if v is not None}

        env_values = {
            key[len(ENV_PREFIX):]: value
            for key, value in environ.items()
            if key.startswith(ENV_PREFIX)
        }

        chosen_preset = preset or env_values.get('PRESET') or file_values.get('PRESET') or 'desk'
        if chosen_preset not in PRESETS:
            raise ConfigError(f"Unknown preset '{chosen_preset}'. Use one of: {', '.join(PRESET_NAMES)}")

        config = cls(preset=chosen_preset, **PRESETS[chosen_preset])
        config._apply(file_values, source=str(config_path))
        config._apply(env_values, source='environment')
        config.preset = chosen_preset
        if seed is not None:
            config.seed = int(seed)
        for name, value in overrides.items():
            if value is not None:
                config._apply({name.upper(): value}, source='overrides')

        config.validate()
        return config

    def _apply(self, values: dict, source: str):
        known = {f.name: f for f in fields(self)}
        unknown = [key for key in values if key.lower() not in known]
        if unknown:
            raise ConfigError(f"Unknown config keys in {source}: {', '.join(sorted(unknown))}")

        for key, raw in values.items():
            spec = known[key.lower()]
            try:
                setattr(self, spec.name, _coerce(raw, spec.type))
            except (TypeError, ValueError) as e:
                raise ConfigError(f"Invalid value for {key} in {source}: {raw!r} ({e})")

    def replace(self, **changes):
        """Return a copy with some fields changed (re-validated)"""
        updated = dataclasses.replace(self, **changes)
        updated.validate()
        return updated

    def validate(self):
        """Validate every field and raise ConfigError listing all problems"""
        problems = []

        def require(condition, message):
            if not condition:
                problems.append(message)

        require(self.preset in PRESETS, f"preset must be one of {PRESET_NAMES}")
        require(self.ablation in ABLATION_MODES, f"ablation must be one of {ABLATION_MODES}")
        require(self.a2l_mode in ('joint', 'sequential'), "a2l_mode must be 'joint' or 'sequential'")
        require(self.schedule_kind == 'linear', "schedule_kind must be 'linear'")
        require(self.tlp_mode in ('unreferenced', 'referenced'), "tlp_mode must be 'unreferenced' or 'referenced'")
        require(self.height > 0 and self.width > 0, "height and width must be positive")
        require(self.ae_factor >= 1 and (self.ae_factor & (self.ae_factor - 1)) == 0,
                "ae_factor must be a power of two")
        require(self.ae_factor >= 1 and self.height % self.ae_factor == 0 and self.width % self.ae_factor == 0,
                "height and width must be divisible by ae_factor")
        require(self.fps > 0, "fps must be positive")
        require(self.sample_rate > 0, "sample_rate must be positive")
        require(0 < self.window_seconds and 0 < self.hop_seconds, "window_seconds and hop_seconds must be positive")
        require(self.content_dim > 0 and self.identity_dim > 0, "content_dim and identity_dim must be positive")
        require(self.audio_window >= 1, "audio_window must be at least 1")
        require(self.diffusion_steps >= 1, "diffusion_steps must be at least 1")
        require(0 < self.beta_start <= self.beta_end < 1, "need 0 < beta_start <= beta_end < 1")
        require(1 <= self.ddim_steps <= self.diffusion_steps, "ddim_steps must lie in [1, diffusion_steps]")
        require(self.ddim_eta >= 0, "ddim_eta must be non-negative")
        require(self.n_identities >= 1 and self.clips_per_identity >= 1 and self.clip_len_frames >= 2,
                "corpus sizes must be positive (clips need at least 2 frames)")
        require(0 <= self.val_fraction < 1, "val_fraction must lie in [0, 1)")
        require(self.a2l_intermediate_weight >= 0, "a2l_intermediate_weight must be non-negative")
        require(self.workers >= 1, "workers must be at least 1")
        require(self.ablation_repeats >= 1, "ablation_repeats must be at least 1")

        if problems:
            raise ConfigError("Invalid configuration: " + '; '.join(problems))
        return True

    def to_dict(self) -> dict:
        """Plain JSON-friendly dict of every field"""
        data = {}
        for f in fields(self):
            value = getattr(self, f.name)
            data[f.name] = str(value) if isinstance(value, Path) else value
        return data

    def config_hash(self) -> str:
        """SHA-256 over all non-path fields, embedded in every artifact"""
        data = {k: v for k, v in self.to_dict().items() if k not in PATH_FIELDS}
        return _hash(data)

    def dataset_hash(self) -> str:
        """SHA-256 over the fields that determine the synthetic corpus"""
        data = {k: v for k, v in self.to_dict().items() if k in DATASET_FIELDS}
        return _hash(data)

    def get_info(self) -> dict:
        """Get configuration information for logging"""
        return {
            'preset': self.preset,
            'seed': self.seed,
            'device': self.device,
            'resolution': f"{self.height}x{self.width}",
            'latent': f"{self.height // self.ae_factor}x{self.width // self.ae_factor}x{self.latent_channels}",
            'diffusion': f"T={self.diffusion_steps}, ddim={self.ddim_steps}, eta={self.ddim_eta}",
            'ablation': self.ablation,
            'config_hash': self.config_hash()[:12],
        }


def _coerce(raw, declared):
    if isinstance(declared, str):
        declared = {'int': int, 'float': float, 'bool': bool, 'str': str, 'Path': Path}.get(declared, str)
    if declared is bool:
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in ('1', 'true', 'yes', 'on'):
            return True
        if text in ('0', 'false', 'no', 'off'):
            return False
        raise ValueError("expected a boolean")
    if declared is int:
        if isinstance(raw, float) and not raw.is_integer():
            raise ValueError("expected an integer")
        return int(float(raw)) if isinstance(raw, str) and '.' in raw else int(raw)
    if declared is Path:
        return Path(raw)
    return declared(raw)


def _hash(data: dict) -> str:
    payload = json.dumps(data, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()
