"""
Frame and Video Synthesis
Audio -> A2L landmarks -> per-frame conditioned DDIM in latent space -> decoded frames
"""

import logging

import numpy as np
import torch
from tqdm import tqdm

from a2l.generate import generate_landmark_sequence
from core.frames import VideoClip, mask_lower_half, tensor_to_frames
from core.landmarks import LandmarkSpace, apply_affine, estimate_similarity_transform, normalize_landmarks
from diffusion.samplers import ddim_sample
from l2v.conditions import ConditionSet, build_conditions
from utils.errors import ContractViolation, DataError, RangeError
from utils.seeding import derive_seed, torch_generator

logger = logging.getLogger(__name__)

# spawn-key namespace for per-frame starting noise
FRAME_NOISE_STREAM = 2


def denoise_step(net, z_t: torch.Tensor, t: int, c: ConditionSet) -> torch.Tensor:
    """ε̂ for one latent batch at timestep t"""
    t_tensor = torch.full((z_t.shape[0],), int(t), dtype=torch.long, device=z_t.device)
    eps = net(z_t, t_tensor, c)
    if eps.shape != z_t.shape:
        raise ContractViolation(f"Denoiser output {tuple(eps.shape)} != latent {tuple(z_t.shape)}")
    return eps


def frame_noise(latent_shape: tuple, seed: int, index: int, dtype=torch.float32) -> torch.Tensor:
    """Unit-Gaussian z_T for output frame `index`, reproducible from the run seed"""
    generator = torch_generator(derive_seed(seed, FRAME_NOISE_STREAM, index))
    return torch.randn((1, *latent_shape), generator=generator, dtype=dtype)


@torch.no_grad()
def synthesize_frame(net, el, ae, schedule, x_p: np.ndarray, x_id: np.ndarray, l, steps: int,
                     eta: float = 0.0, z_T: torch.Tensor | None = None, ablation: str = 'full',
                     generator: torch.Generator | None = None) -> np.ndarray:
    """
    Generate one frame conditioned on pose, identity and landmark

    Args:
        net: Denoiser
        el: Landmark encoder
        ae: Autoencoder
        schedule: Noise schedule the denoiser was trained with
        x_p: Pose reference (lower half masked)
        x_id: Identity reference frame
        l: Pixel-space target landmark
        steps: DDIM steps
        eta: DDIM stochasticity
        z_T: Starting noise; drawn from `generator` when omitted
        ablation: Condition mode the denoiser was trained in

    Returns:
        np.ndarray: H x W x 3 frame in [0, 1]
    """
    conditions = build_conditions(ae, el, x_p, x_id, l, ablation)
    if z_T is None:
        z_T = torch.randn(conditions.z_p.shape, generator=generator, dtype=conditions.z_p.dtype)
    z0 = ddim_sample(schedule, net, conditions, steps, eta, z_T.to(conditions.z_p.dtype), generator=generator)
    return tensor_to_frames(ae.decode(z0))[0]


def reference_index(i: int, length: int, loop: bool) -> int:
    if i < length:
        return i
    if not loop:
        raise RangeError(f"Reference clip has {length} frames but frame {i} was requested")
    return i % length


@torch.no_grad()
def generate_video(a2l_model, components, audio, reference: VideoClip, config, features,
                   return_landmarks: bool = False):
    """
    Full audio-driven generation against a reference clip

    Args:
        a2l_model: Trained A2L model
        components: L2VComponents
        audio: Driving AudioClip
        reference: Clip supplying pose frames, the identity frame and landmarks
        config: Run configuration (seed, ddim_steps, ddim_eta, reference_loop, identity_frame_index)
        features: FeatureConfig the A2L model was trained with
        return_landmarks: Also return the canonical A2L sequence

    Returns:
        VideoClip: floor(duration * fps) frames; `landmarks` holds the pixel-space conditioning landmarks

    Raises:
        DataError: Reference clip without frames or landmarks
        RangeError: Reference too short and reference_loop disabled
    """
    if len(reference) == 0 or reference.landmarks is None:
        raise DataError("Reference clip needs frames and per-frame landmarks")
    height, width = reference.height, reference.width
    if not 0 <= config.identity_frame_index < len(reference):
        raise RangeError(f"identity_frame_index {config.identity_frame_index} outside the reference clip")

    l0 = normalize_landmarks(reference.landmarks[0], height, width)
    sequence = generate_landmark_sequence(a2l_model, audio, l0, reference.fps, features)
    x_id = reference.frames[config.identity_frame_index]
    ae = components.ae
    latent_shape = ae.latent_shape(height, width)

    frames, landmarks = [], []
    for i, l in enumerate(tqdm(sequence.items, desc='Generate', leave=False)):
        ref = reference_index(i, len(reference), config.reference_loop)
        transform = estimate_similarity_transform(l0, reference.landmarks[ref])
        target = apply_affine(transform, l, space=LandmarkSpace.PIXEL)
        frames.append(synthesize_frame(
            components.net, components.el, ae, components.schedule,
            mask_lower_half(reference.frames[ref]), x_id, target,
            steps=config.ddim_steps, eta=config.ddim_eta,
            z_T=frame_noise(latent_shape, config.seed, i, ae.dtype),
            ablation=components.ablation,
            generator=torch_generator(derive_seed(config.seed, FRAME_NOISE_STREAM + 1, i)),
        ))
        landmarks.append(target)

    logger.info(f"✅ Generated {len(frames)} frames from {audio.duration:.2f} s of audio")
    clip = VideoClip(frames, fps=reference.fps, landmarks=landmarks,
                     meta={'seed': config.seed, 'ablation': components.ablation})
    if return_landmarks:
        return clip, sequence
    return clip
