"""
Generation Commands
Audio + reference clip -> frame directory with conditioning landmarks
"""

import json
import logging
from pathlib import Path

from a2l.model import A2LModel
from a2l.sequence import LandmarkSequence
from audio.features import AudioClip
from commands.blueprint import CommandBlueprint, arg
from commands.experiment import record_artifact
from core.frames import VideoClip
from core.landmarks import denormalize_landmarks
from l2v.components import L2VComponents
from l2v.pipeline import generate_video
from middleware.artifact_guard import output_lock, requires_artifacts
from utils.errors import DataError
from utils.media import read_frame_dir, read_landmark_csv, read_png, read_wav, write_frame_dir, write_landmark_csv

logger = logging.getLogger(__name__)

LANDMARK_FILE = 'landmarks.csv'
A2L_LANDMARK_FILE = 'a2l_landmarks.csv'

generate_bp = CommandBlueprint('generate')


def read_clip_dir(path, fps: float | None = None, require_landmarks: bool = False) -> VideoClip:
    """
    Read a corpus clip directory (frames/ + meta.json) or a flat frame directory

    Args:
        path: Clip or frame directory
        fps: Frame rate when the directory carries no metadata
        require_landmarks: Fail unless landmarks.csv is present

    Raises:
        DataError: Missing frames, metadata or required landmarks
    """
    path = Path(path)
    if (path / 'frames').is_dir():
        meta_path = path / 'meta.json'
        meta = json.loads(meta_path.read_text()) if meta_path.is_file() else {}
        frames = [read_png(p) for p in sorted((path / 'frames').glob('*.png'))]
        if not frames:
            raise DataError(f"No PNG frames in {path / 'frames'}")
        clip = VideoClip(frames, fps=float(meta.get('fps', fps or 25.0)), meta=meta)
    else:
        clip = read_frame_dir(path, fps)

    landmark_path = path / LANDMARK_FILE
    if landmark_path.is_file():
        landmarks = read_landmark_csv(landmark_path)
        if len(landmarks) != len(clip):
            raise DataError(f"{landmark_path} has {len(landmarks)} rows for {len(clip)} frames")
        clip = VideoClip(clip.frames, clip.fps, landmarks=landmarks, meta=clip.meta)
    elif require_landmarks:
        raise DataError(f"Reference clip {path} has no {LANDMARK_FILE}")
    return clip


def read_audio(path) -> AudioClip:
    samples, sample_rate = read_wav(path)
    return AudioClip(samples, sample_rate)


def write_generation(out, clip: VideoClip, sequence: LandmarkSequence, config, extra_meta: dict | None = None) -> Path:
    """Frames + meta.json + conditioning landmarks + the raw A2L sequence in pixel coordinates"""
    out = Path(out)
    for stale in out.glob('*.png'):
        stale.unlink()
    meta = {
        'config_hash': config.config_hash(),
        'dataset_hash': config.dataset_hash(),
        'seed': config.seed,
        'ablation': clip.meta.get('ablation', config.ablation),
    }
    meta.update(extra_meta or {})
    write_frame_dir(out, clip, extra_meta=meta)
    write_landmark_csv(out / LANDMARK_FILE, clip.landmarks)
    write_landmark_csv(out / A2L_LANDMARK_FILE,
                       [denormalize_landmarks(l, clip.height, clip.width) for l in sequence.items])
    return out


@generate_bp.command(
    'generate', 'Generate a talking-head frame directory from audio and a reference clip',
    arg('--audio', type=Path, required=True, help='Driving WAV file'),
    arg('--reference', type=Path, required=True, help='Reference clip directory with landmarks.csv'),
    arg('--out', type=Path, required=True, help='Output frame directory'),
)
@requires_artifacts('a2l', 'ae', 'l2v')
def cmd_generate(args, config):
    """
    Run the full pipeline and write floor(duration * fps) frames

    Raises:
        DependencyError: A checkpoint is missing
        DataError: Unreadable audio or reference clip
    """
    a2l_model, features, _ = A2LModel.load(args.artifacts['a2l'])
    components = L2VComponents.load(args.artifacts['ae'], args.artifacts['l2v'])
    audio = read_audio(args.audio)
    reference = read_clip_dir(args.reference, config.fps, require_landmarks=True)

    clip, sequence = generate_video(a2l_model, components, audio, reference, config, features,
                                    return_landmarks=True)
    with output_lock(args.out):
        out = write_generation(args.out, clip, sequence, config,
                               {'audio': str(args.audio), 'reference': str(args.reference)})

    record_artifact(config, 'outputs', out.name, out)
    logger.info(f"✅ Wrote {len(clip)} frames to {out}")
    print(out)
    return 0
