"""
Landmark Sequence Generation
Audio clip + initial landmark -> canonical landmark sequence at video rate
"""

import logging

import numpy as np
import torch

from a2l.model import A2LModel
from a2l.sequence import LandmarkSequence
from audio.features import AudioClip, FeatureConfig, align_windows, extract_content, extract_identity
from core.landmarks import Landmark, LandmarkSpace
from utils.errors import ContractViolation, EmptyInputError

logger = logging.getLogger(__name__)


def frame_count(duration: float, fps: float) -> int:
    # tolerance keeps 2.0 s * 25 fps at 50 despite float rounding
    return int(np.floor(duration * fps + 1e-9))


@torch.no_grad()
def generate_landmark_sequence(m: A2LModel, a: AudioClip, l0: Landmark, fps: float, features: FeatureConfig,
                               return_intermediate: bool = False):
    """
    Run both A2L stages over a whole clip

    Args:
        m: Trained model
        a: Driving audio
        l0: Canonical initial landmark
        fps: Output frame rate
        features: Extractor settings the model was trained with
        return_intermediate: Also return the context-stage sequence

    Returns:
        LandmarkSequence: floor(duration * fps) landmarks (and the intermediate sequence when asked)

    Raises:
        EmptyInputError: Audio shorter than one video frame
        ModelDivergenceError: A stage predicted a non-finite or out-of-range landmark

    Example:
        >>> seq = generate_landmark_sequence(model, two_second_clip, l0, 25.0, features)
        >>> len(seq)
        50
    """
    if l0.space is not LandmarkSpace.CANONICAL:
        raise ContractViolation("l0 must be canonical")
    content = extract_content(a, features)
    identity = extract_identity(a, features)
    n_frames = frame_count(a.duration, fps)
    if n_frames < 1:
        raise EmptyInputError(f"Audio of {a.duration:.3f} s is shorter than one video frame at {fps} fps")

    windows = align_windows(content, n_frames, fps, m.params.window, clamp=True)
    dtype = m.dtype
    windows_t = torch.as_tensor(windows, dtype=dtype).unsqueeze(0)
    a_id = torch.as_tensor(identity.values, dtype=dtype).unsqueeze(0)
    l0_t = torch.as_tensor(l0.flat(), dtype=dtype).unsqueeze(0)

    intermediate, final = m(windows_t, a_id, l0_t)
    context_sequence = LandmarkSequence.from_prediction(intermediate[0], fps, stage='context')
    sequence = LandmarkSequence.from_prediction(final[0], fps, stage='identity')
    logger.debug(f"Generated {n_frames} landmarks from {a.duration:.2f} s of audio")
    if return_intermediate:
        return sequence, context_sequence
    return sequence
