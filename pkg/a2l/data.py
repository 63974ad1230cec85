"""
A2L Training Data
Fixed-length chunks of (content windows, identity embedding, initial landmark, target landmarks)
"""

import logging
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import Dataset

from audio.cache import load_embedding, save_embedding
from audio.features import ContentEmbedding, FeatureConfig, align_windows, extract_content, extract_identity
from core.landmarks import N_POINTS, normalize_landmarks
from utils.errors import ContractViolation

logger = logging.getLogger(__name__)


def clip_embeddings(clip, features: FeatureConfig, cache_dir=None) -> tuple:
    """Content (T x D1) and identity (D2) embeddings of a corpus clip, cached when cache_dir is set"""
    key = features.fingerprint()
    stem = f"{clip.path.parent.name}_{clip.path.name}"
    if cache_dir is not None:
        content_path = Path(cache_dir) / f"{stem}_content.npy"
        identity_path = Path(cache_dir) / f"{stem}_identity.npy"
        content = load_embedding(content_path, key)
        identity = load_embedding(identity_path, key)
        if content is not None and identity is not None:
            return ContentEmbedding(content, features.hop_seconds), identity

    content = extract_content(clip.audio, features)
    identity = extract_identity(clip.audio, features).values
    if cache_dir is not None:
        save_embedding(content_path, content.values, features.hop_seconds, key)
        save_embedding(identity_path, identity, None, key)
    return content, identity


class A2LDataset(Dataset):
    """
    Tensor-backed dataset of K-frame chunks

    Each item is (windows (K, W_a, D1), a_id (D2), l0 (136), target (K, 136)).
    l0 is the first frame of the chunk's clip, matching generation where the
    reference clip's first landmark seeds the sequence.
    """

    def __init__(self, windows, a_id, l0, target, dtype=torch.float32):
        self.windows = torch.as_tensor(np.asarray(windows), dtype=dtype)
        self.a_id = torch.as_tensor(np.asarray(a_id), dtype=dtype)
        self.l0 = torch.as_tensor(np.asarray(l0), dtype=dtype)
        self.target = torch.as_tensor(np.asarray(target), dtype=dtype)
        n = self.windows.shape[0]
        if not (self.a_id.shape[0] == self.l0.shape[0] == self.target.shape[0] == n):
            raise ContractViolation("A2LDataset tensors disagree on the number of samples")

    def __len__(self):
        return self.windows.shape[0]

    def __getitem__(self, index):
        return self.windows[index], self.a_id[index], self.l0[index], self.target[index]

    @property
    def chunk(self) -> int:
        return self.target.shape[1] if len(self) else 0

    @classmethod
    def from_clips(cls, clips, features: FeatureConfig, window: int, chunk: int, cache_dir=None, dtype=torch.float32):
        """
        Cut every clip into non-overlapping chunks of `chunk` frames

        Args:
            clips: SyntheticClip list (frames, pixel landmarks, audio)
            features: Extractor settings
            window: Audio frames per content window
            chunk: Frames per training sequence (K)
            cache_dir: Optional embedding cache directory
            dtype: Tensor dtype

        Returns:
            A2LDataset: Possibly empty when every clip is shorter than `chunk`
        """
        windows, a_ids, l0s, targets = [], [], [], []
        for clip in clips:
            video = clip.video
            n = len(video)
            if n < chunk:
                logger.warning(f"⚠️ Clip {clip.path} has {n} frames, fewer than chunk {chunk}; skipped")
                continue
            content, identity = clip_embeddings(clip, features, cache_dir)
            clip_windows = align_windows(content, n, video.fps, window, clamp=True)
            points = np.stack([normalize_landmarks(l, video.height, video.width).flat() for l in video.landmarks])
            for start in range(0, n - chunk + 1, chunk):
                windows.append(clip_windows[start:start + chunk])
                a_ids.append(identity)
                l0s.append(points[0])
                targets.append(points[start:start + chunk])

        if not windows:
            empty_w = np.zeros((0, chunk, window, features.content_dim))
            return cls(empty_w, np.zeros((0, features.identity_dim)), np.zeros((0, 2 * N_POINTS)), np.zeros((0, chunk, 2 * N_POINTS)), dtype)
        logger.info(f"✅ Built {len(windows)} A2L chunks of {chunk} frames from {len(clips)} clips")
        return cls(np.stack(windows), np.stack(a_ids), np.stack(l0s), np.stack(targets), dtype)
