"""
Synthetic Corpus Writer and Reader
<root>/<identity>/<clip>/{frames/%05d.png, landmarks.csv, audio.wav, meta.json} + manifest.json
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from audio.features import AudioClip
from core.frames import VideoClip
from core.landmarks import denormalize_landmarks
from synthdata.identity import DrivingSignal, SyntheticIdentity, clip_seed, identity_seed, make_driving_signal
from synthdata.pseudo_audio import synthesize_pseudo_audio
from synthdata.render import render_face
from synthdata.trajectory import sample_trajectory
from utils.errors import DataError, DependencyError
from utils.media import FRAME_PATTERN, read_landmark_csv, read_png, read_wav, write_landmark_csv, write_png, write_wav

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class ClipJob:
    directory: Path
    identity_index: int
    clip_index: int
    master_seed: int
    n_frames: int
    height: int
    width: int
    fps: float
    sample_rate: int


@dataclass
class SyntheticClip:
    """One corpus clip loaded back from disk"""

    video: VideoClip
    audio: AudioClip
    driving: DrivingSignal
    identity: SyntheticIdentity
    meta: dict
    path: Path


def split_clips(clips_per_identity: int, val_fraction: float) -> list:
    """Split label per clip index: the last round(val_fraction * n) clips are validation"""
    n_val = int(round(val_fraction * clips_per_identity))
    if val_fraction > 0 and clips_per_identity >= 2:
        n_val = min(max(n_val, 1), clips_per_identity - 1)
    else:
        n_val = 0
    return ['train'] * (clips_per_identity - n_val) + ['val'] * n_val


def render_clip(identity: SyntheticIdentity, driving: DrivingSignal, height: int, width: int):
    """Landmarks (pixel space) and frames for one driving signal"""
    trajectory = sample_trajectory(identity, driving)
    landmarks = [denormalize_landmarks(l, height, width) for l in trajectory.items]
    frames = [render_face(identity, l, height, width) for l in landmarks]
    return landmarks, frames


def _write_clip(job: ClipJob) -> dict:
    identity = SyntheticIdentity.from_seed(identity_seed(job.master_seed, job.identity_index))
    seed = clip_seed(job.master_seed, job.identity_index, job.clip_index)
    driving = make_driving_signal(job.n_frames, job.fps, seed)
    landmarks, frames = render_clip(identity, driving, job.height, job.width)
    audio = synthesize_pseudo_audio(identity, driving, job.sample_rate)

    frame_dir = job.directory / 'frames'
    frame_dir.mkdir(parents=True, exist_ok=True)
    for index, frame in enumerate(frames):
        write_png(frame_dir / FRAME_PATTERN.format(index), frame)
    write_landmark_csv(job.directory / 'landmarks.csv', landmarks)
    write_wav(job.directory / 'audio.wav', audio.samples, audio.sample_rate)

    meta = {
        'fps': job.fps,
        'height': job.height,
        'width': job.width,
        'frames': job.n_frames,
        'sample_rate': job.sample_rate,
        'master_seed': job.master_seed,
        'identity_seed': identity.seed,
        'clip_seed': seed,
        'identity': identity.to_dict(),
        'driving_signal': driving.values.tolist(),
    }
    (job.directory / 'meta.json').write_text(json.dumps(meta, indent=2, sort_keys=True) + '\n')
    return meta


def make_dataset(root, n_identities: int, clips_per_identity: int, clip_len_frames: int, config) -> Path:
    """
    Generate the synthetic corpus and its manifest

    Args:
        root: Output directory
        n_identities: Number of synthetic speakers
        clips_per_identity: Clips per speaker
        clip_len_frames: Frames per clip
        config: Config supplying seed, H, W, fps, sample rate, split and workers

    Returns:
        Path: The manifest file

    Raises:
        ContractViolation-style DataError: Unwritable output path

    Example:
        >>> make_dataset('data/corpus', 2, 3, 50, cfg)
        PosixPath('data/corpus/manifest.json')
    """
    if n_identities < 1 or clips_per_identity < 1 or clip_len_frames < 1:
        raise DataError("Corpus sizes must be positive")
    root = Path(root)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataError(f"Cannot create dataset directory {root}: {e}")

    splits = split_clips(clips_per_identity, config.val_fraction)
    jobs, entries = [], []
    for i in range(n_identities):
        for j in range(clips_per_identity):
            relative = Path(f"id_{i:03d}") / f"clip_{j:03d}"
            jobs.append(ClipJob(
                directory=root / relative,
                identity_index=i,
                clip_index=j,
                master_seed=config.seed,
                n_frames=clip_len_frames,
                height=config.height,
                width=config.width,
                fps=config.fps,
                sample_rate=config.sample_rate,
            ))
            entries.append({
                'identity': f"id_{i:03d}",
                'clip': f"clip_{j:03d}",
                'path': relative.as_posix(),
                'split': splits[j],
                'frames': clip_len_frames,
            })

    logger.info(f"⏳ Rendering {len(jobs)} clips ({n_identities} identities x {clips_per_identity}) into {root}")
    try:
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                list(pool.map(_write_clip, jobs))
        else:
            for job in jobs:
                _write_clip(job)
    except OSError as e:
        raise DataError(f"Failed to write dataset under {root}: {e}")

    manifest = {
        'format_version': MANIFEST_VERSION,
        'master_seed': config.seed,
        'dataset_hash': config.dataset_hash(),
        'height': config.height,
        'width': config.width,
        'fps': config.fps,
        'sample_rate': config.sample_rate,
        'clips': entries,
    }
    path = root / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + '\n')
    logger.info(f"✅ Dataset manifest written to {path}")
    return path


def load_manifest(root) -> dict:
    path = Path(root) / MANIFEST_NAME
    if not path.is_file():
        raise DependencyError(f"Dataset manifest not found: {path}", missing=[str(path)])
    return json.loads(path.read_text())


def clip_entries(root, split: str | None = None) -> list:
    """Manifest entries, optionally restricted to 'train' or 'val'"""
    entries = load_manifest(root)['clips']
    return [e for e in entries if split is None or e['split'] == split]


def load_clip(path) -> SyntheticClip:
    """Load frames, landmarks, audio and metadata of one clip directory"""
    path = Path(path)
    meta_path = path / 'meta.json'
    if not meta_path.is_file():
        raise DataError(f"Clip metadata missing: {meta_path}")
    meta = json.loads(meta_path.read_text())
    frames = [read_png(p) for p in sorted((path / 'frames').glob('*.png'))]
    landmarks = read_landmark_csv(path / 'landmarks.csv')
    samples, sample_rate = read_wav(path / 'audio.wav')
    fps = float(meta['fps'])
    identity = SyntheticIdentity.from_seed(int(meta['identity_seed']))
    return SyntheticClip(
        video=VideoClip(frames, fps=fps, landmarks=landmarks, meta=meta),
        audio=AudioClip(samples, sample_rate),
        driving=DrivingSignal(np.asarray(meta['driving_signal']), fps),
        identity=identity,
        meta=meta,
        path=path,
    )


def load_split(root, split: str | None = None) -> list:
    root = Path(root)
    return [load_clip(root / e['path']) for e in clip_entries(root, split)]
