"""
Evaluation Commands
Scores a generated frame directory against ground truth
"""

import json
import logging
from pathlib import Path

from commands.blueprint import CommandBlueprint, arg
from commands.experiment import record_artifact
from commands.generate import read_clip_dir
from metrics.report import TABLE_HEADER, MetricsReport, evaluate_video, table_row
from synthdata.dataset import MANIFEST_NAME
from utils.errors import DataError
from utils.validators import validate_metrics_report

logger = logging.getLogger(__name__)

evaluate_bp = CommandBlueprint('evaluate')


def dataset_hash_of(path: Path, meta: dict) -> str | None:
    """The corpus hash a frame directory came from: its own metadata, else the nearest corpus manifest"""
    if meta.get('dataset_hash'):
        return meta['dataset_hash']
    for parent in list(path.resolve().parents)[:3]:
        manifest = parent / MANIFEST_NAME
        if manifest.is_file():
            return json.loads(manifest.read_text()).get('dataset_hash')
    return None


def check_comparable(gen, gt, gen_path: Path, gt_path: Path, allow_hash_mismatch: bool = False):
    """
    Raises:
        DataError: Frame count, frame shape or dataset hash differ
    """
    if len(gen) != len(gt):
        raise DataError(
            f"Frame counts differ: {gen_path} has {len(gen)} frames, {gt_path} has {len(gt)} "
            f"(difference {len(gen) - len(gt):+d})"
        )
    if gen.frames[0].shape != gt.frames[0].shape:
        raise DataError(f"Frame shapes differ: {gen.frames[0].shape} vs {gt.frames[0].shape}")

    gen_hash = dataset_hash_of(gen_path, gen.meta)
    gt_hash = dataset_hash_of(gt_path, gt.meta)
    if gen_hash and gt_hash and gen_hash != gt_hash:
        message = f"Dataset hashes differ: {gen_hash[:12]} (generated) vs {gt_hash[:12]} (ground truth)"
        if not allow_hash_mismatch:
            raise DataError(message + "; pass --allow-hash-mismatch to compare anyway")
        logger.warning(f"⚠️ {message}")


def score(gen_path, gt_path, config, allow_hash_mismatch: bool = False) -> MetricsReport:
    gen_path, gt_path = Path(gen_path), Path(gt_path)
    gen = read_clip_dir(gen_path, config.fps)
    gt = read_clip_dir(gt_path, config.fps)
    check_comparable(gen, gt, gen_path, gt_path, allow_hash_mismatch)
    report = evaluate_video(gen, gt, config)
    is_valid, error = validate_metrics_report(report.to_dict())
    if not is_valid:
        raise DataError(f"Metrics report failed schema validation: {error}")
    return report


@evaluate_bp.command(
    'evaluate', 'Score a generated frame directory against ground truth',
    arg('--gen', type=Path, required=True, help='Generated frame directory'),
    arg('--gt', type=Path, required=True, help='Ground-truth clip or frame directory'),
    arg('--out', type=Path, default=None, help='Report JSON (defaults to RUN_DIR/reports/<gen>.json)'),
    arg('--allow-hash-mismatch', action='store_true', help='Compare artifacts from different corpora'),
)
def cmd_evaluate(args, config):
    """
    Write a MetricsReport JSON and print a tLP / Pixel-MSE table row

    Raises:
        DataError: Unequal lengths (with the count difference) or mismatched dataset hashes
    """
    report = score(args.gen, args.gt, config, args.allow_hash_mismatch)
    out = args.out or config.run_dir / 'reports' / f"{Path(args.gen).name}.json"
    report.write(out)
    record_artifact(config, 'reports', Path(out).stem, out)

    print(TABLE_HEADER)
    print(table_row(Path(args.gen).name, report))
    logger.info(f"✅ Report written to {out}")
    return 0
