"""
Synthetic Identities and Driving Signals
Seeded face/timbre parameters and band-limited mouth-opening controls
"""

from dataclasses import dataclass

import numpy as np

from utils.errors import ContractViolation
from utils.seeding import derive_seed

# Documented parameter ranges, canonical units unless noted
IDENTITY_RANGES = {
    'skull_rx': (0.55, 0.68),
    'skull_ry': (0.74, 0.86),
    'eye_spacing': (0.26, 0.34),
    'lip_thickness': (0.04, 0.07),
    'mouth_width': (0.17, 0.22),
    'mouth_gain': (0.7, 1.3),
    'base_frequency': (110.0, 260.0),  # Hz
    'formant_offset': (0.5, 1.5),
}
SKIN_RANGES = ((0.72, 0.98), (0.50, 0.85), (0.40, 0.75))

MIN_SINUSOIDS, MAX_SINUSOIDS = 2, 4
MIN_FREQUENCY, MAX_FREQUENCY = 0.5, 4.0  # Hz


def identity_seed(master_seed: int, identity_index: int) -> int:
    """Seed splitting rule for identities: SeedSequence(master, spawn_key=(0, i))"""
    return derive_seed(master_seed, 0, identity_index)


def clip_seed(master_seed: int, identity_index: int, clip_index: int) -> int:
    """Seed splitting rule for clips: SeedSequence(master, spawn_key=(1, i, j))"""
    return derive_seed(master_seed, 1, identity_index, clip_index)


@dataclass(frozen=True)
class SyntheticIdentity:
    """Face shape and voice timbre of one cartoon speaker"""

    seed: int
    skull_rx: float
    skull_ry: float
    eye_spacing: float
    lip_thickness: float
    mouth_width: float
    mouth_gain: float
    skin_rgb: tuple
    base_frequency: float
    formant_offsets: tuple

    @classmethod
    def from_seed(cls, seed: int) -> 'SyntheticIdentity':
        """
        Draw every parameter from its documented range

        Example:
            >>> SyntheticIdentity.from_seed(7) == SyntheticIdentity.from_seed(7)
            True
        """
        rng = np.random.default_rng(seed)

        def draw(name):
            lo, hi = IDENTITY_RANGES[name]
            return float(rng.uniform(lo, hi))

        return cls(
            seed=int(seed),
            skull_rx=draw('skull_rx'),
            skull_ry=draw('skull_ry'),
            eye_spacing=draw('eye_spacing'),
            lip_thickness=draw('lip_thickness'),
            mouth_width=draw('mouth_width'),
            mouth_gain=draw('mouth_gain'),
            skin_rgb=tuple(float(rng.uniform(lo, hi)) for lo, hi in SKIN_RANGES),
            base_frequency=draw('base_frequency'),
            formant_offsets=(draw('formant_offset'), draw('formant_offset')),
        )

    @property
    def lip_rgb(self) -> tuple:
        r, g, b = self.skin_rgb
        return (r * 0.78, g * 0.42, b * 0.48)

    def to_dict(self) -> dict:
        return {
            'seed': self.seed,
            'skull_rx': self.skull_rx,
            'skull_ry': self.skull_ry,
            'eye_spacing': self.eye_spacing,
            'lip_thickness': self.lip_thickness,
            'mouth_width': self.mouth_width,
            'mouth_gain': self.mouth_gain,
            'skin_rgb': list(self.skin_rgb),
            'base_frequency': self.base_frequency,
            'formant_offsets': list(self.formant_offsets),
        }


@dataclass(frozen=True)
class DrivingSignal:
    """Per-video-frame mouth-opening control in [0, 1]"""

    values: np.ndarray
    fps: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size == 0:
            raise ContractViolation("DrivingSignal needs at least one value")
        if values.min() < 0.0 or values.max() > 1.0:
            raise ContractViolation("DrivingSignal values must lie in [0, 1]")
        if self.fps <= 0:
            raise ContractViolation("DrivingSignal fps must be positive")
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return self.values.size

    @property
    def duration(self) -> float:
        return self.values.size / self.fps


def make_driving_signal(n_frames: int, fps: float, seed: int) -> DrivingSignal:
    """
    Sum of 2-4 seeded sinusoids (0.5-4 Hz) around 0.5, clipped to [0, 1]

    Args:
        n_frames: Number of video frames
        fps: Video frame rate
        seed: Signal seed

    Returns:
        DrivingSignal: The mouth-opening control
    """
    rng = np.random.default_rng(seed)
    count = int(rng.integers(MIN_SINUSOIDS, MAX_SINUSOIDS + 1))
    freqs = rng.uniform(MIN_FREQUENCY, MAX_FREQUENCY, size=count)
    amps = rng.uniform(0.3, 1.0, size=count)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=count)

    t = np.arange(n_frames) / fps
    wave = (amps[:, None] * np.sin(2.0 * np.pi * freqs[:, None] * t[None] + phases[:, None])).sum(axis=0)
    wave = 0.5 + 0.7 * wave / amps.sum()
    return DrivingSignal(np.clip(wave, 0.0, 1.0), fps)


def constant_signal(n_frames: int, fps: float, value: float = 0.0) -> DrivingSignal:
    return DrivingSignal(np.full(n_frames, float(value)), fps)
