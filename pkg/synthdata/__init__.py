"""
Deterministic synthetic talking-face corpus with exact audio/landmark/frame ground truth
"""

from synthdata.dataset import SyntheticClip, load_clip, load_manifest, load_split, make_dataset
from synthdata.identity import DrivingSignal, SyntheticIdentity, constant_signal, make_driving_signal
from synthdata.pseudo_audio import synthesize_pseudo_audio
from synthdata.render import lip_bounding_box, measure_mouth_opening, render_face
from synthdata.trajectory import gap_for_signal, sample_trajectory, signal_for_gap

__all__ = [
    'DrivingSignal', 'SyntheticClip', 'SyntheticIdentity', 'constant_signal', 'gap_for_signal',
    'lip_bounding_box', 'load_clip', 'load_manifest', 'load_split', 'make_dataset',
    'make_driving_signal', 'measure_mouth_opening', 'render_face', 'sample_trajectory',
    'signal_for_gap', 'synthesize_pseudo_audio',
]
