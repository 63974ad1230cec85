"""
Training Commands
train a2l | ae | l2v, each resumable from its checkpoint
"""

import logging

from a2l.data import A2LDataset
from a2l.train import train_a2l
from audio.features import FeatureConfig
from commands.blueprint import CommandBlueprint, arg
from commands.experiment import record_artifact
from core.frames import frames_to_tensor
from l2v.autoencoder import Autoencoder, train_autoencoder
from l2v.train import L2VData, train_l2v
from middleware.artifact_guard import artifact_path, output_lock, requires_artifacts
from synthdata.dataset import load_split

logger = logging.getLogger(__name__)

PHASES = ('a2l', 'ae', 'l2v')

train_bp = CommandBlueprint('train')


def clip_frames(clips) -> list:
    return [frame for clip in clips for frame in clip.video.frames]


@requires_artifacts('dataset')
def train_a2l_phase(args, config):
    features = FeatureConfig.from_config(config)
    cache_dir = config.run_dir / 'cache'
    datasets = {
        split: A2LDataset.from_clips(load_split(config.data_dir, split), features, config.audio_window,
                                     config.a2l_chunk, cache_dir=cache_dir)
        for split in ('train', 'val')
    }
    model, records = train_a2l(datasets['train'], config, val_dataset=datasets['val'],
                               run_dir=config.run_dir, resume=args.resume)
    return artifact_path(config, 'a2l'), records


@requires_artifacts('dataset')
def train_ae_phase(args, config):
    train = frames_to_tensor(clip_frames(load_split(config.data_dir, 'train')))
    val_clips = load_split(config.data_dir, 'val')
    val = frames_to_tensor(clip_frames(val_clips)) if val_clips else None
    model, records = train_autoencoder(train, config, val_frames=val, run_dir=config.run_dir, resume=args.resume)
    return artifact_path(config, 'ae'), records


@requires_artifacts('dataset', 'ae')
def train_l2v_phase(args, config):
    ae, _ = Autoencoder.load(args.artifacts['ae'])
    data = L2VData.from_clips(load_split(config.data_dir, 'train'), ae)
    components, records = train_l2v(data, ae, config, run_dir=config.run_dir, resume=args.resume)
    return artifact_path(config, 'l2v'), records


PHASE_HANDLERS = {
    'a2l': train_a2l_phase,
    'ae': train_ae_phase,
    'l2v': train_l2v_phase,
}


@train_bp.command(
    'train', 'Train one pipeline phase',
    arg('phase', choices=PHASES, help='a2l, ae, or l2v (l2v needs a trained ae)'),
    arg('--resume', action='store_true', help='Continue from the phase checkpoint when it exists'),
)
def cmd_train(args, config):
    """
    Train the named phase and register its checkpoint

    Raises:
        DependencyError: Dataset or autoencoder checkpoint missing
    """
    logger.info(f"⏳ Training {args.phase} with {config.get_info()}")
    with output_lock(config.run_dir):
        checkpoint, records = PHASE_HANDLERS[args.phase](args, config)
    record_artifact(config, 'checkpoints', args.phase if args.phase != 'l2v' else checkpoint.stem, checkpoint)

    last = records[-1] if records else {}
    summary = ', '.join(f"{k}={v:.6f}" for k, v in last.items() if isinstance(v, float) and k != 'wall_time')
    print(f"{checkpoint} {summary}".strip())
    return 0
