"""
Dataset Commands
Renders the synthetic cartoon corpus
"""

import logging
from pathlib import Path

from commands.blueprint import CommandBlueprint, arg
from commands.experiment import record_artifact
from middleware.artifact_guard import output_lock
from synthdata.dataset import load_manifest, make_dataset
from utils.errors import DataError
from utils.validators import validate_manifest

logger = logging.getLogger(__name__)

synth_data_bp = CommandBlueprint('synth-data')


@synth_data_bp.command(
    'synth-data', 'Render the synthetic corpus (frames, landmarks, pseudo-audio, manifest)',
    arg('--out', type=Path, default=None, help='Dataset directory (defaults to DATA_DIR)'),
)
def cmd_synth_data(args, config):
    """
    Render N_IDENTITIES x CLIPS_PER_IDENTITY clips of CLIP_LEN_FRAMES frames

    Prints:
        The manifest path on standard output

    Raises:
        DataError: Output path cannot be created or written
    """
    root = config.data_dir
    if args.out is not None:
        root = args.out
        config = config.replace(data_dir=root)

    with output_lock(root):
        manifest_path = make_dataset(root, config.n_identities, config.clips_per_identity,
                                     config.clip_len_frames, config)

    is_valid, error = validate_manifest(load_manifest(root))
    if not is_valid:
        raise DataError(f"Written manifest is invalid: {error}")

    record_artifact(config, 'dataset_manifest', 'dataset', manifest_path)
    print(manifest_path)
    return 0
