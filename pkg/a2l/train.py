"""
A2L Training
Joint or sequential optimisation of the context and identity networks; extractors stay frozen
"""

import logging
from pathlib import Path

import torch
from torch.utils.data import DataLoader
from tqdm import tqdm

from a2l.data import A2LDataset
from a2l.loss import combined_loss, landmark_loss
from a2l.model import A2LHyperParams, A2LModel
from audio.features import FeatureConfig
from utils.checkpoints import load_checkpoint
from utils.errors import ConfigError
from utils.runlog import TrainingLog
from utils.seeding import seed_everything, torch_generator

logger = logging.getLogger(__name__)

A2L_MODES = ('joint', 'sequential')
GRAD_CLIP = 1.0


def checkpoint_path(run_dir) -> Path:
    return Path(run_dir) / 'checkpoints' / 'a2l.pt'


def stage_for_epoch(mode: str, epoch: int, epochs: int) -> str:
    """'joint', or for sequential training 'context' then 'identity' (half the epochs each)"""
    if mode == 'joint':
        return 'joint'
    return 'context' if epoch < max(epochs // 2, 1) else 'identity'


def stage_loss(model: A2LModel, batch, stage: str, intermediate_weight: float) -> torch.Tensor:
    windows, a_id, l0, target = batch
    if stage == 'identity':
        with torch.no_grad():
            intermediate, _ = model.context(windows, l0)
        final, _ = model.identity(windows, a_id, intermediate)
        return landmark_loss(final, target)
    if stage == 'context':
        intermediate, _ = model.context(windows, l0)
        return landmark_loss(intermediate, target)
    intermediate, final = model(windows, a_id, l0)
    return combined_loss(intermediate, final, target, intermediate_weight)


@torch.no_grad()
def evaluate_a2l(model: A2LModel, dataset: A2LDataset, intermediate_weight: float = 0.0, batch_size: int = 64) -> float:
    """
    Dataset-mean training objective

    With intermediate_weight = 0 this is the final-stage loss alone.
    """
    total, count = 0.0, 0
    for batch in DataLoader(dataset, batch_size=batch_size, shuffle=False):
        intermediate, final = model(batch[0], batch[1], batch[2])
        loss = combined_loss(intermediate, final, batch[3], intermediate_weight)
        total += float(loss) * batch[0].shape[0]
        count += batch[0].shape[0]
    return total / max(count, 1)


def train_a2l(dataset: A2LDataset, config, val_dataset: A2LDataset | None = None, run_dir=None,
              resume: bool = False, epochs: int | None = None) -> tuple:
    """
    Train the landmark generation network

    Args:
        dataset: Training chunks
        config: Run configuration (seed, a2l_* hyperparameters)
        val_dataset: Optional held-out chunks; val_loss is the final-stage loss
        run_dir: Where checkpoints/a2l.pt and logs/a2l.jsonl go (None keeps everything in memory)
        resume: Continue from the run's checkpoint when it exists
        epochs: Overrides config.a2l_epochs

    Returns:
        tuple: (A2LModel, list of log records)

    Raises:
        ConfigError: Empty dataset or unknown mode
    """
    if len(dataset) == 0:
        raise ConfigError("A2L training dataset is empty")
    if config.a2l_mode not in A2L_MODES:
        raise ConfigError(f"Unknown A2L mode '{config.a2l_mode}', expected one of {A2L_MODES}")
    epochs = config.a2l_epochs if epochs is None else epochs
    weight = config.a2l_intermediate_weight

    seed_everything(config.seed)
    model = A2LModel(A2LHyperParams.from_config(config)).to(dtype=dataset.windows.dtype)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.a2l_lr)
    generator = torch_generator(config.seed)
    loader = DataLoader(dataset, batch_size=config.a2l_batch_size, shuffle=True, generator=generator)

    ckpt = checkpoint_path(run_dir) if run_dir is not None else None
    log_path = Path(run_dir) / 'logs' / 'a2l.jsonl' if run_dir is not None else None
    start_epoch = 0
    resuming = resume and ckpt is not None and ckpt.is_file()
    log = TrainingLog(log_path, resume=resuming)
    if resuming:
        payload = load_checkpoint(ckpt, 'a2l')
        model.load_state_dict(payload['state_dict'])
        optimizer.load_state_dict(payload['optimizer'])
        generator.set_state(payload['generator_state'])
        start_epoch = payload['epoch']
        log.truncate('epoch', start_epoch)
        logger.info(f"⏳ Resuming A2L training at epoch {start_epoch}")
    else:
        initial = evaluate_a2l(model, dataset, weight)
        val = evaluate_a2l(model, val_dataset) if val_dataset is not None and len(val_dataset) else None
        log.write(epoch=0, train_loss=initial, val_loss=val, initial_loss=initial)
        logger.info(f"A2L initial loss {initial:.6f}")

    def save(epoch):
        if ckpt is None:
            return
        model.save(
            ckpt, config.config_hash(), FeatureConfig.from_config(config),
            optimizer=optimizer.state_dict(), epoch=epoch, generator_state=generator.get_state(),
            mode=config.a2l_mode,
        )

    for epoch in tqdm(range(start_epoch, epochs), desc='A2L', leave=False):
        stage = stage_for_epoch(config.a2l_mode, epoch, epochs)
        model.train()
        total, count = 0.0, 0
        for batch in loader:
            optimizer.zero_grad()
            loss = stage_loss(model, batch, stage, weight)
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), GRAD_CLIP)
            optimizer.step()
            total += float(loss) * batch[0].shape[0]
            count += batch[0].shape[0]
        model.eval()
        val = evaluate_a2l(model, val_dataset) if val_dataset is not None and len(val_dataset) else None
        log.write(epoch=epoch + 1, train_loss=total / count, val_loss=val, stage=stage)
        if (epoch + 1) % max(config.checkpoint_every, 1) == 0:
            save(epoch + 1)

    save(epochs)
    model.eval()
    logger.info(f"✅ A2L training finished after {epochs} epochs, final loss {log.last('train_loss'):.6f}")
    return model, log.records
