"""
Perceptual Compression Autoencoder
Strided-conv encoder E and mirrored decoder D; latents carry a scale so diffusion sees unit variance
"""

import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn
from torch.utils.data import DataLoader, TensorDataset
from tqdm import tqdm

from core.frames import tensor_to_frames
from metrics.quality import psnr
from utils.checkpoints import load_checkpoint, save_checkpoint
from utils.errors import ConfigError, ContractViolation
from utils.runlog import TrainingLog
from utils.seeding import seed_everything, torch_generator

logger = logging.getLogger(__name__)

COMPONENT = 'ae'


def norm_groups(channels: int) -> int:
    return math.gcd(channels, 8)


@dataclass(frozen=True)
class AEHyperParams:
    factor: int = 4
    latent_channels: int = 3
    base_channels: int = 32

    @classmethod
    def from_config(cls, config) -> 'AEHyperParams':
        return cls(config.ae_factor, config.latent_channels, config.ae_base_channels)

    @property
    def levels(self) -> int:
        return int(round(math.log2(self.factor)))


class Autoencoder(nn.Module):
    """
    E: (B, 3, H, W) -> (B, c_lat, H/f, W/f) and D back to [0, 1]

    `encode`/`decode` work in diffusion space: raw latents multiplied by
    `latent_scale` (1 until set_latent_scale is called after training).
    """

    def __init__(self, params: AEHyperParams):
        super().__init__()
        if params.factor < 1 or 2 ** params.levels != params.factor:
            raise ConfigError(f"Downsampling factor must be a power of two, got {params.factor}")
        self.params = params
        width = params.base_channels

        encoder = [nn.Conv2d(3, width, 3, padding=1), nn.SiLU()]
        for _ in range(params.levels):
            encoder += [
                nn.Conv2d(width, width, 4, stride=2, padding=1),
                nn.GroupNorm(norm_groups(width), width),
                nn.SiLU(),
                nn.Conv2d(width, width, 3, padding=1),
                nn.SiLU(),
            ]
        encoder.append(nn.Conv2d(width, params.latent_channels, 1))
        self.encoder = nn.Sequential(*encoder)

        decoder = [nn.Conv2d(params.latent_channels, width, 3, padding=1), nn.SiLU()]
        for _ in range(params.levels):
            decoder += [
                nn.Upsample(scale_factor=2, mode='nearest'),
                nn.Conv2d(width, width, 3, padding=1),
                nn.GroupNorm(norm_groups(width), width),
                nn.SiLU(),
                nn.Conv2d(width, width, 3, padding=1),
                nn.SiLU(),
            ]
        decoder.append(nn.Conv2d(width, 3, 3, padding=1))
        self.decoder = nn.Sequential(*decoder)
        self.register_buffer('latent_scale', torch.tensor(1.0))

    def check_input(self, x: torch.Tensor):
        f = self.params.factor
        if x.dim() != 4 or x.shape[1] != 3:
            raise ContractViolation(f"Expected (B, 3, H, W) frames, got {tuple(x.shape)}")
        if x.shape[2] % f or x.shape[3] % f:
            raise ContractViolation(f"Frame size {x.shape[2]}x{x.shape[3]} is not divisible by f={f}")

    def encode_raw(self, x: torch.Tensor) -> torch.Tensor:
        self.check_input(x)
        return self.encoder(x)

    def decode_raw(self, z: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.decoder(z))

    def encode(self, x: torch.Tensor) -> torch.Tensor:
        return self.encode_raw(x) * self.latent_scale

    def decode(self, z: torch.Tensor) -> torch.Tensor:
        return self.decode_raw(z / self.latent_scale)

    def forward(self, x: torch.Tensor):
        z = self.encode_raw(x)
        return self.decode_raw(z), z

    def latent_shape(self, height: int, width: int) -> tuple:
        f = self.params.factor
        return (self.params.latent_channels, height // f, width // f)

    @torch.no_grad()
    def set_latent_scale(self, frames: torch.Tensor, batch_size: int = 64) -> float:
        """Scale raw latents of `frames` to unit standard deviation"""
        latents = torch.cat([self.encode_raw(frames[i:i + batch_size]) for i in range(0, len(frames), batch_size)])
        std = float(latents.std())
        self.latent_scale.fill_(1.0 / max(std, 1e-8))
        return float(self.latent_scale)

    @property
    def dtype(self) -> torch.dtype:
        return self.latent_scale.dtype

    def save(self, path, config_hash: str, **extras):
        return save_checkpoint(path, COMPONENT, self.state_dict(), config_hash, asdict(self.params), **extras)

    @classmethod
    def load(cls, path) -> tuple:
        payload = load_checkpoint(path, COMPONENT)
        model = cls(AEHyperParams(**payload['config']))
        model.load_state_dict(payload['state_dict'])
        model.eval()
        return model, payload


def reconstruction_loss(model: Autoencoder, x: torch.Tensor, latent_penalty: float) -> torch.Tensor:
    """L1 reconstruction plus a small penalty on raw latent magnitude"""
    recon, z = model(x)
    return F.l1_loss(recon, x) + latent_penalty * z.pow(2).mean()


@torch.no_grad()
def reconstruction_psnr(model: Autoencoder, frames: torch.Tensor, batch_size: int = 64) -> float:
    values = []
    for i in range(0, len(frames), batch_size):
        batch = frames[i:i + batch_size]
        recon = model.decode(model.encode(batch))
        values += [psnr(a, b) for a, b in zip(tensor_to_frames(recon), tensor_to_frames(batch))]
    return float(np.mean(values))


def train_autoencoder(frames: torch.Tensor, config, val_frames: torch.Tensor | None = None, run_dir=None,
                      resume: bool = False, epochs: int | None = None) -> tuple:
    """
    Train E and D on a frame tensor, then fix the latent scale

    Args:
        frames: (N, 3, H, W) training frames in [0, 1]
        config: Run configuration (ae_* hyperparameters)
        val_frames: Held-out frames for PSNR reporting
        run_dir: Where checkpoints/ae.pt and logs/ae.jsonl go
        resume: Continue from an existing checkpoint
        epochs: Overrides config.ae_epochs

    Returns:
        tuple: (Autoencoder, list of log records)

    Raises:
        ConfigError: Empty frame set
    """
    if frames is None or len(frames) == 0:
        raise ConfigError("Autoencoder training needs at least one frame")
    epochs = config.ae_epochs if epochs is None else epochs

    seed_everything(config.seed)
    model = Autoencoder(AEHyperParams.from_config(config)).to(dtype=frames.dtype)
    model.check_input(frames[:1])
    optimizer = torch.optim.Adam(model.parameters(), lr=config.ae_lr)
    generator = torch_generator(config.seed)
    loader = DataLoader(TensorDataset(frames), batch_size=config.ae_batch_size, shuffle=True, generator=generator)

    ckpt = Path(run_dir) / 'checkpoints' / 'ae.pt' if run_dir is not None else None
    log_path = Path(run_dir) / 'logs' / 'ae.jsonl' if run_dir is not None else None
    resuming = resume and ckpt is not None and ckpt.is_file()
    log = TrainingLog(log_path, resume=resuming)
    start_epoch = 0
    if resuming:
        payload = load_checkpoint(ckpt, COMPONENT)
        model.load_state_dict(payload['state_dict'])
        optimizer.load_state_dict(payload['optimizer'])
        generator.set_state(payload['generator_state'])
        start_epoch = payload['epoch']
        log.truncate('epoch', start_epoch)
        logger.info(f"⏳ Resuming autoencoder training at epoch {start_epoch}")

    def save(epoch, **extras):
        if ckpt is not None:
            model.save(ckpt, config.config_hash(), optimizer=optimizer.state_dict(), epoch=epoch,
                       generator_state=generator.get_state(), **extras)

    for epoch in tqdm(range(start_epoch, epochs), desc='AE', leave=False):
        model.train()
        total, count = 0.0, 0
        for (batch,) in loader:
            optimizer.zero_grad()
            loss = reconstruction_loss(model, batch, config.ae_latent_penalty)
            loss.backward()
            optimizer.step()
            total += float(loss) * batch.shape[0]
            count += batch.shape[0]
        model.eval()
        record = {'epoch': epoch + 1, 'train_loss': total / count}
        if val_frames is not None and len(val_frames):
            record['val_psnr'] = reconstruction_psnr(model, val_frames)
        log.write(**record)
        if (epoch + 1) % max(config.checkpoint_every, 1) == 0:
            save(epoch + 1)

    model.eval()
    scale = model.set_latent_scale(frames)
    val_psnr = reconstruction_psnr(model, val_frames) if val_frames is not None and len(val_frames) else None
    save(epochs, val_psnr=val_psnr)
    logger.info(f"✅ Autoencoder trained: latent scale {scale:.4f}, val PSNR {val_psnr}")
    return model, log.records
