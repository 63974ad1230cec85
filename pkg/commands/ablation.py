"""
Ablation Commands
Trains and scores the full, w/o corr and w/o visual L2V variants under identical seeds and budgets
"""

import json
import logging
from pathlib import Path

import numpy as np

from a2l.model import A2LModel
from commands.blueprint import CommandBlueprint, arg
from commands.experiment import record_artifact
from core.frames import VideoClip
from l2v.autoencoder import Autoencoder
from l2v.pipeline import generate_video
from l2v.train import L2VData, train_l2v
from metrics.report import PIXEL_MSE_SCALE, TLP_SCALE, evaluate_video, format_table
from middleware.artifact_guard import output_lock, requires_artifacts
from synthdata.dataset import load_split
from utils.errors import DataError

logger = logging.getLogger(__name__)

# (ablation mode, table row label) in table order
ABLATION_ROWS = (
    ('full', 'Full'),
    ('no_corr', 'w/o corr'),
    ('no_visual', 'w/o visual'),
)

ablation_bp = CommandBlueprint('ablation')


def trim_to(clip: VideoClip, n: int) -> VideoClip:
    landmarks = clip.landmarks[:n] if clip.landmarks is not None else None
    return VideoClip(clip.frames[:n], clip.fps, landmarks=landmarks, meta=clip.meta)


def score_variant(a2l_model, components, features, clips, config) -> dict:
    """Mean tLP and Pixel-MSE (report scaling) over validation clips"""
    tlp, mse = [], []
    for clip in clips:
        generated = generate_video(a2l_model, components, clip.audio, clip.video, config, features)
        n = min(len(generated), len(clip.video))
        if n < 2:
            raise DataError(f"Clip {clip.path} yields fewer than two comparable frames")
        report = evaluate_video(trim_to(generated, n), trim_to(clip.video, n), config)
        tlp.append(report.tlp)
        mse.append(report.pixel_mse_temporal)
    return {'tlp': float(np.mean(tlp)), 'pixel_mse_temporal': float(np.mean(mse))}


def ordering_holds(scores: dict, key: str) -> bool:
    values = [scores[mode][key] for mode, _ in ABLATION_ROWS]
    return all(a <= b for a, b in zip(values, values[1:]))


def summarize(repetitions: list) -> dict:
    """Per-row means across repetitions and how often full <= w/o corr <= w/o visual held (ties count)"""
    rows = {}
    for mode, label in ABLATION_ROWS:
        rows[label] = {
            'mode': mode,
            'tlp': float(np.mean([r[mode]['tlp'] for r in repetitions])),
            'pixel_mse_temporal': float(np.mean([r[mode]['pixel_mse_temporal'] for r in repetitions])),
            'per_repetition': [r[mode] for r in repetitions],
        }
    ordering = {key: sum(ordering_holds(r, key) for r in repetitions) for key in ('tlp', 'pixel_mse_temporal')}
    return {'rows': rows, 'ordering': ordering, 'repetitions': len(repetitions)}


@ablation_bp.command(
    'ablation', 'Train and compare the full, w/o corr and w/o visual L2V variants',
    arg('--clips', type=int, default=None, help='Score only the first N validation clips'),
    arg('--resume', action='store_true', help='Reuse variant checkpoints from an interrupted sweep'),
)
@requires_artifacts('dataset', 'ae', 'a2l')
def cmd_ablation(args, config):
    """
    Run ABLATION_REPEATS seeded repetitions of the three-variant sweep

    Each repetition trains every variant from seed (SEED + repetition) on the
    same pre-encoded latents, then generates and scores the validation clips.

    Writes:
        RUN_DIR/ablation/ablation.json and ablation.md
    """
    a2l_model, features, _ = A2LModel.load(args.artifacts['a2l'])
    ae, _ = Autoencoder.load(args.artifacts['ae'])
    data = L2VData.from_clips(load_split(config.data_dir, 'train'), ae)
    clips = load_split(config.data_dir, 'val')
    if args.clips is not None:
        clips = clips[:args.clips]
    if not clips:
        raise DataError("The corpus has no validation clips to score the ablation on")

    out_dir = Path(config.run_dir) / 'ablation'
    repetitions = []
    with output_lock(out_dir):
        for rep in range(config.ablation_repeats):
            rep_config = config.replace(seed=config.seed + rep)
            rep_dir = out_dir / f"rep_{rep:02d}"
            scores = {}
            for mode, label in ABLATION_ROWS:
                logger.info(f"⏳ Repetition {rep + 1}/{config.ablation_repeats}: {label}")
                components, _ = train_l2v(data, ae, rep_config, run_dir=rep_dir, resume=args.resume, ablation=mode)
                scores[mode] = score_variant(a2l_model, components.eval(), features, clips, rep_config)
            repetitions.append(scores)

        summary = summarize(repetitions)
        summary.update({
            'config_hash': config.config_hash(),
            'dataset_hash': config.dataset_hash(),
            'clips': [str(c.path) for c in clips],
            'scales': {'tlp': TLP_SCALE, 'pixel_mse_temporal': PIXEL_MSE_SCALE},
        })
        table = format_table({label: row for label, row in summary['rows'].items()})
        json_path = out_dir / 'ablation.json'
        json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + '\n')
        (out_dir / 'ablation.md').write_text(table + '\n')

    record_artifact(config, 'reports', 'ablation', json_path)
    print(table)
    n = summary['repetitions']
    print(f"Ordering Full < w/o corr < w/o visual held in {summary['ordering']['tlp']}/{n} repetitions (tLP) "
          f"and {summary['ordering']['pixel_mse_temporal']}/{n} (Pixel-MSE)")
    return 0
