"""
L2V Training
Landmark-conditioned latent diffusion on pre-encoded corpus frames
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from tqdm import tqdm

from core.frames import frames_to_tensor, mask_lower_half
from core.landmarks import normalize_landmarks
from core.raster import rasterize_landmarks
from diffusion.process import diffusion_loss
from diffusion.schedule import NoiseSchedule, schedule_from_config
from l2v.autoencoder import Autoencoder
from l2v.components import L2VComponents, l2v_checkpoint_name
from l2v.conditions import check_ablation, conditions_from_latents
from l2v.landmark_encoder import LandmarkEncoder
from l2v.unet import DenoisingNet, UNetHyperParams
from utils.checkpoints import load_checkpoint
from utils.errors import ConfigError
from utils.runlog import TrainingLog
from utils.seeding import derive_seed, seed_everything, torch_generator

logger = logging.getLogger(__name__)

GRAD_CLIP = 1.0
EVAL_BATCHES = 4


@torch.no_grad()
def _encode(ae: Autoencoder, frames: list, batch_size: int) -> torch.Tensor:
    out = []
    for i in range(0, len(frames), batch_size):
        out.append(ae.encode(frames_to_tensor(frames[i:i + batch_size], ae.dtype)))
    return torch.cat(out)


@dataclass
class L2VData:
    """
    Frozen-autoencoder latents of every training frame

    z0: target frames; z_p: lower-half-masked targets; z_l: landmark rasters;
    landmarks: canonical (N, 136); clip_start/clip_length locate each
    frame's clip so identity frames can be drawn from the same clip.
    """

    z0: torch.Tensor
    z_p: torch.Tensor
    z_l: torch.Tensor
    landmarks: torch.Tensor
    clip_start: torch.Tensor
    clip_length: torch.Tensor

    def __len__(self):
        return self.z0.shape[0]

    @classmethod
    def from_clips(cls, clips, ae: Autoencoder, batch_size: int = 64) -> 'L2VData':
        """
        Encode frames, pose references and landmark rasters of corpus clips

        Raises:
            ConfigError: A clip carries no landmarks, or no frames at all
        """
        targets, poses, rasters, points, starts, lengths = [], [], [], [], [], []
        for clip in clips:
            video = getattr(clip, 'video', clip)
            if video.landmarks is None:
                raise ConfigError(f"L2V training needs ground-truth landmarks; clip {getattr(clip, 'path', '?')} has none")
            start = len(targets)
            for frame, l in zip(video.frames, video.landmarks):
                targets.append(frame)
                poses.append(mask_lower_half(frame))
                rasters.append(rasterize_landmarks(l, video.height, video.width))
                points.append(normalize_landmarks(l, video.height, video.width).flat())
            starts += [start] * len(video)
            lengths += [len(video)] * len(video)
        if not targets:
            raise ConfigError("L2V training dataset is empty")
        dtype = ae.dtype
        return cls(
            z0=_encode(ae, targets, batch_size),
            z_p=_encode(ae, poses, batch_size),
            z_l=_encode(ae, rasters, batch_size),
            landmarks=torch.as_tensor(np.stack(points), dtype=dtype),
            clip_start=torch.as_tensor(starts, dtype=torch.long),
            clip_length=torch.as_tensor(lengths, dtype=torch.long),
        )

    def identity_indices(self, index: torch.Tensor, generator: torch.Generator | None = None) -> torch.Tensor:
        """A uniformly random other frame of the same clip (the frame itself for one-frame clips)"""
        start = self.clip_start[index]
        length = self.clip_length[index]
        local = index - start
        offsets = (torch.rand(index.shape, generator=generator) * (length - 1)).floor().long() + 1
        return start + (local + offsets) % length

    def batch(self, index: torch.Tensor, identity_index: torch.Tensor) -> dict:
        return {
            'z0': self.z0[index],
            'z_p': self.z_p[index],
            'z_id': self.z0[identity_index],
            'z_l': self.z_l[index],
            'landmarks': self.landmarks[index],
        }

    def sample_batch(self, batch_size: int, generator: torch.Generator | None = None) -> dict:
        index = torch.randint(0, len(self), (batch_size,), generator=generator)
        return self.batch(index, self.identity_indices(index, generator))


def l2v_loss(net: DenoisingNet, el: LandmarkEncoder, schedule: NoiseSchedule, batch: dict, ablation: str,
             generator: torch.Generator | None = None, t: torch.Tensor | None = None,
             eps: torch.Tensor | None = None) -> torch.Tensor:
    """Conditional ε-prediction loss for one batch"""
    conditions = conditions_from_latents(batch['z_p'], batch['z_id'], batch['z_l'], batch['landmarks'], el, ablation)
    return diffusion_loss(schedule, net, batch['z0'], conditions, generator=generator, t=t, eps=eps)


@torch.no_grad()
def evaluate_l2v(net, el, schedule, data: L2VData, ablation: str, seed: int, batch_size: int = 32,
                 batches: int = EVAL_BATCHES) -> float:
    """Loss averaged over a fixed set of batches, timesteps and noise draws"""
    generator = torch_generator(seed)
    losses = [float(l2v_loss(net, el, schedule, data.sample_batch(batch_size, generator), ablation, generator))
              for _ in range(batches)]
    return float(np.mean(losses))


def train_l2v(data: L2VData, ae: Autoencoder, config, run_dir=None, resume: bool = False,
              steps: int | None = None, ablation: str | None = None) -> tuple:
    """
    Train the denoiser and landmark encoder jointly against a frozen autoencoder

    Args:
        data: Pre-encoded training frames
        ae: Trained autoencoder (kept frozen)
        config: Run configuration (l2v_* and diffusion settings)
        run_dir: Where checkpoints/l2v*.pt and logs/l2v*.jsonl go
        resume: Continue from the run's checkpoint when it exists
        steps: Overrides config.l2v_steps
        ablation: Overrides config.ablation

    Returns:
        tuple: (L2VComponents, list of log records)

    Example:
        >>> components, log = train_l2v(data, ae, cfg, steps=100)
        >>> log[0]['eval_loss'] > log[-1]['eval_loss']
        True
    """
    ablation = config.ablation if ablation is None else ablation
    check_ablation(ablation)
    if len(data) == 0:
        raise ConfigError("L2V training dataset is empty")
    steps = config.l2v_steps if steps is None else steps
    schedule = schedule_from_config(config)
    dtype = data.z0.dtype

    seed_everything(config.seed)
    net = DenoisingNet(UNetHyperParams.from_config(config, ablation)).to(dtype=dtype)
    el = LandmarkEncoder(config.landmark_dim).to(dtype=dtype)
    components = L2VComponents(ae.eval(), net, el, schedule, ablation)
    optimizer = torch.optim.Adam(list(net.parameters()) + list(el.parameters()), lr=config.l2v_lr)
    generator = torch_generator(derive_seed(config.seed, 3))
    eval_seed = derive_seed(config.seed, 4)

    name = l2v_checkpoint_name(ablation)
    ckpt = Path(run_dir) / 'checkpoints' / name if run_dir is not None else None
    log_path = Path(run_dir) / 'logs' / name.replace('.pt', '.jsonl') if run_dir is not None else None
    resuming = resume and ckpt is not None and ckpt.is_file()
    log = TrainingLog(log_path, resume=resuming)
    start = 0
    if resuming:
        payload = load_checkpoint(ckpt, 'l2v')
        net.load_state_dict(payload['state_dict']['net'])
        el.load_state_dict(payload['state_dict']['el'])
        optimizer.load_state_dict(payload['optimizer'])
        generator.set_state(payload['generator_state'])
        start = payload['step']
        log.truncate('step', start)
        logger.info(f"⏳ Resuming L2V ({ablation}) at step {start}")
    else:
        initial = evaluate_l2v(net, el, schedule, data, ablation, eval_seed, config.l2v_batch_size)
        log.write(step=0, train_loss=initial, eval_loss=initial, initial_loss=initial)

    def save(step):
        if ckpt is not None:
            components.save(ckpt, config.config_hash(), optimizer=optimizer.state_dict(), step=step,
                            generator_state=generator.get_state())

    log_every = max(steps // 100, 1)
    save_every = log_every * max(config.checkpoint_every, 1)
    running, count = 0.0, 0
    for step in tqdm(range(start, steps), desc=f'L2V {ablation}', leave=False):
        net.train()
        el.train()
        optimizer.zero_grad()
        loss = l2v_loss(net, el, schedule, data.sample_batch(config.l2v_batch_size, generator), ablation, generator)
        loss.backward()
        torch.nn.utils.clip_grad_norm_(list(net.parameters()) + list(el.parameters()), GRAD_CLIP)
        optimizer.step()
        running += float(loss)
        count += 1
        # the last step is logged below together with the eval loss
        if (step + 1) % log_every == 0 and step + 1 < steps:
            log.write(step=step + 1, train_loss=running / count)
            running, count = 0.0, 0
        if (step + 1) % save_every == 0:
            save(step + 1)

    components.eval()
    final = evaluate_l2v(net, el, schedule, data, ablation, eval_seed, config.l2v_batch_size)
    if all(r.get('step') != steps for r in log.records):
        closing = {'train_loss': running / count} if count else {}
        log.write(step=steps, eval_loss=final, **closing)
    save(steps)
    logger.info(f"✅ L2V ({ablation}) trained for {steps} steps, eval loss {final:.4f}")
    return components, log.records
