"""
Media File Utilities
Landmark CSV, PNG frame directories and mono PCM WAV files
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
from PIL import Image
from scipy.io import wavfile

from core.frames import VideoClip
from core.landmarks import N_POINTS, Landmark, LandmarkSpace
from utils.errors import DataError, EmptyInputError

logger = logging.getLogger(__name__)

LANDMARK_COLUMNS = ['frame_index'] + [f"{axis}{i}" for i in range(N_POINTS) for axis in ('x', 'y')]
FRAME_PATTERN = '{:05d}.png'
PCM_SCALE = 32768.0


def write_landmark_csv(path, landmarks) -> Path:
    """
    Write pixel-space landmarks, one row per frame

    Args:
        path: Destination CSV file
        landmarks: Sequence of pixel-space Landmark

    Returns:
        Path: The written file

    Example:
        >>> write_landmark_csv('clip/landmarks.csv', clip.landmarks)
    """
    rows = []
    for index, l in enumerate(landmarks):
        if l.space is not LandmarkSpace.PIXEL:
            raise DataError("Landmark CSV stores pixel-space coordinates only")
        rows.append([index, *l.flat()])
    frame = pd.DataFrame(rows, columns=LANDMARK_COLUMNS)
    frame['frame_index'] = frame['frame_index'].astype(int)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator='\n')
    return path


def read_landmark_csv(path) -> list:
    """Read a landmark CSV written by write_landmark_csv"""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Landmark file not found: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in LANDMARK_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"Landmark file {path} lacks columns: {', '.join(missing[:4])}...")
    frame = frame.sort_values('frame_index')
    values = frame[LANDMARK_COLUMNS[1:]].to_numpy(dtype=np.float64)
    return [Landmark(row.reshape(N_POINTS, 2), LandmarkSpace.PIXEL) for row in values]


def frame_to_uint8(frame: np.ndarray) -> np.ndarray:
    return np.round(np.clip(frame, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_png(path, frame: np.ndarray):
    Image.fromarray(frame_to_uint8(frame), mode='RGB').save(path, format='PNG')


def read_png(path) -> np.ndarray:
    with Image.open(path) as image:
        return np.asarray(image.convert('RGB'), dtype=np.float64) / 255.0


def write_frame_dir(directory, clip: VideoClip, extra_meta: dict | None = None) -> Path:
    """
    Write a clip as zero-padded PNG frames plus meta.json (fps, H, W)

    Returns:
        Path: The frame directory
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for index, frame in enumerate(clip.frames):
        write_png(directory / FRAME_PATTERN.format(index), frame)
    meta = {'fps': clip.fps, 'height': clip.height, 'width': clip.width, 'frames': len(clip)}
    meta.update(extra_meta or {})
    (directory / 'meta.json').write_text(json.dumps(meta, indent=2, sort_keys=True) + '\n')
    return directory


def read_frame_dir(directory, fps: float | None = None) -> VideoClip:
    """Read every PNG of a frame directory in index order"""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"Frame directory not found: {directory}")
    paths = sorted(directory.glob('*.png'))
    if not paths:
        raise EmptyInputError(f"No PNG frames in {directory}")
    meta_path = directory / 'meta.json'
    meta = json.loads(meta_path.read_text()) if meta_path.is_file() else {}
    if fps is None:
        fps = float(meta.get('fps', 25.0))
    return VideoClip([read_png(p) for p in paths], fps=fps, meta=meta)


def write_wav(path, samples: np.ndarray, sample_rate: int):
    """Write mono 16-bit PCM; samples are expected in [-1, 1]"""
    pcm = np.round(np.clip(samples, -1.0, 1.0 - 1.0 / PCM_SCALE) * PCM_SCALE).astype(np.int16)
    wavfile.write(str(path), int(sample_rate), pcm)


def read_wav(path) -> tuple[np.ndarray, int]:
    """Read a mono PCM WAV as float64 samples in [-1, 1]"""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Audio file not found: {path}")
    sample_rate, data = wavfile.read(str(path))
    if data.ndim > 1:
        logger.warning(f"⚠️ {path.name} has {data.shape[1]} channels, averaging to mono")
        data = data.mean(axis=1)
    if np.issubdtype(data.dtype, np.integer):
        samples = data.astype(np.float64) / float(np.iinfo(data.dtype).max + 1)
    else:
        samples = data.astype(np.float64)
    return samples, int(sample_rate)
