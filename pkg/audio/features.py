"""
Speech Feature Extraction
Log-mel based content and identity embeddings plus per-frame context windows
"""

import functools
import hashlib
import json
import logging
from dataclasses import dataclass

import librosa
import numpy as np

from utils.errors import ContractViolation, EmptyInputError, RangeError

logger = logging.getLogger(__name__)

LOG_FLOOR = 1e-6
LOG_CENTER = -7.0
LOG_SCALE = 4.0
# Constant stats entry so silent clips still normalise to a unit vector
IDENTITY_BIAS = 1e-3


@dataclass(frozen=True)
class FeatureConfig:
    """Extractor settings; part of every A2L checkpoint"""

    sample_rate: int = 16000
    n_mels: int = 80
    window_seconds: float = 0.025
    hop_seconds: float = 0.010
    content_dim: int = 32
    identity_dim: int = 32
    projection_seed: int = 1234

    @classmethod
    def from_config(cls, config) -> 'FeatureConfig':
        return cls(
            sample_rate=config.sample_rate,
            n_mels=config.n_mels,
            window_seconds=config.window_seconds,
            hop_seconds=config.hop_seconds,
            content_dim=config.content_dim,
            identity_dim=config.identity_dim,
            projection_seed=config.projection_seed,
        )

    @property
    def window_samples(self) -> int:
        return int(round(self.window_seconds * self.sample_rate))

    @property
    def hop_samples(self) -> int:
        return int(round(self.hop_seconds * self.sample_rate))

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def fingerprint(self) -> str:
        """Short hash used to key embedding caches"""
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if self.sample_rate <= 0:
            raise ContractViolation("sample_rate must be positive")
        if not np.all(np.isfinite(samples)):
            raise ContractViolation("Audio samples must be finite")
        object.__setattr__(self, 'samples', samples)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class ContentEmbedding:
    values: np.ndarray  # T x D1
    frame_hop: float    # seconds

    @property
    def num_frames(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class IdentityEmbedding:
    values: np.ndarray  # D2, unit norm


@dataclass(frozen=True)
class ContentWindow:
    values: np.ndarray  # W_a x D1


@functools.lru_cache(maxsize=16)
def _projection(seed: int, rows: int, cols: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((rows, cols)) / np.sqrt(rows)
    matrix.setflags(write=False)
    return matrix


def _prepare(clip: AudioClip, cfg: FeatureConfig) -> np.ndarray:
    if clip.samples.size == 0:
        raise EmptyInputError("Audio clip is empty")
    samples = clip.samples
    if clip.sample_rate != cfg.sample_rate:
        samples = librosa.resample(samples, orig_sr=clip.sample_rate, target_sr=cfg.sample_rate)
    if samples.size < cfg.window_samples:
        raise ContractViolation(
            f"Audio clip has {samples.size} samples, shorter than one analysis window ({cfg.window_samples})"
        )
    return samples


def log_mel(clip: AudioClip, cfg: FeatureConfig) -> np.ndarray:
    """
    Log-mel filterbank energies, one row per analysis frame

    Returns:
        np.ndarray: (floor((N - window) / hop) + 1) x n_mels, scaled to roughly unit range
    """
    samples = _prepare(clip, cfg)
    mel = librosa.feature.melspectrogram(
        y=samples,
        sr=cfg.sample_rate,
        n_fft=cfg.window_samples,
        hop_length=cfg.hop_samples,
        win_length=cfg.window_samples,
        center=False,
        power=2.0,
        n_mels=cfg.n_mels,
    )
    return ((np.log(mel + LOG_FLOOR) - LOG_CENTER) / LOG_SCALE).T


def extract_content(clip: AudioClip, cfg: FeatureConfig) -> ContentEmbedding:
    """
    Per-frame content embedding: log-mel projected by a fixed seeded matrix to D1

    Args:
        clip: Input audio
        cfg: Feature configuration

    Returns:
        ContentEmbedding: T x D1 values at cfg.hop_seconds

    Raises:
        EmptyInputError: Empty clip

    Example:
        >>> emb = extract_content(AudioClip(np.zeros(16000), 16000), FeatureConfig())
        >>> emb.values.shape
        (98, 32)
    """
    features = log_mel(clip, cfg)
    projection = _projection(cfg.projection_seed, cfg.n_mels, cfg.content_dim)
    return ContentEmbedding(features @ projection, cfg.hop_seconds)


def extract_identity(clip: AudioClip, cfg: FeatureConfig) -> IdentityEmbedding:
    """
    Global speaker vector from band-wise mean and spread of the log-mel

    Both statistics are centered across bands so the vector describes
    spectral shape rather than overall level, then projected to D2 and
    L2-normalised.
    """
    features = log_mel(clip, cfg)
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    stats = np.concatenate([mean - mean.mean(), std - std.mean(), [IDENTITY_BIAS]])
    projection = _projection(cfg.projection_seed + 1, stats.size, cfg.identity_dim)
    vector = stats @ projection
    return IdentityEmbedding(vector / np.linalg.norm(vector))


def audio_frame_for_video_frame(index: int, fps: float, hop_seconds: float) -> int:
    """Audio frame nearest to video frame `index`"""
    return int(np.floor(index / (hop_seconds * fps) + 0.5))


def align_window(c: ContentEmbedding, index: int, fps: float, window: int) -> ContentWindow:
    """
    The `window` audio frames centered on video frame `index`

    Even windows take the extra row on the left. Rows outside [0, T) are
    zero padding.

    Raises:
        RangeError: The video frame maps outside the clip
    """
    if window < 1:
        raise ContractViolation("window must be at least 1")
    center = audio_frame_for_video_frame(index, fps, c.frame_hop)
    total = c.num_frames
    if index < 0 or not 0 <= center < total:
        raise RangeError(f"Video frame {index} maps to audio frame {center}, outside [0, {total})")
    return ContentWindow(_slice_padded(c.values, center, window))


def _slice_padded(values: np.ndarray, center: int, window: int) -> np.ndarray:
    start = center - window // 2
    out = np.zeros((window, values.shape[1]), dtype=values.dtype)
    lo = max(start, 0)
    hi = min(start + window, values.shape[0])
    out[lo - start:hi - start] = values[lo:hi]
    return out


def align_windows(c: ContentEmbedding, n_frames: int, fps: float, window: int, clamp: bool = False) -> np.ndarray:
    """
    Stack windows for video frames 0..n_frames-1 into (n_frames, window, D1)

    With clamp=True, frames whose center falls past the last audio frame
    reuse the last frame (rounding at the clip tail).
    """
    if not clamp:
        return np.stack([align_window(c, i, fps, window).values for i in range(n_frames)])
    centers = [min(audio_frame_for_video_frame(i, fps, c.frame_hop), c.num_frames - 1) for i in range(n_frames)]
    return np.stack([_slice_padded(c.values, center, window) for center in centers])
