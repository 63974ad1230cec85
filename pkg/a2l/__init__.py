"""
Audio-to-landmark stage: context and identity LSTMs, loss, training and inference
"""

from a2l.data import A2LDataset
from a2l.generate import generate_landmark_sequence
from a2l.loss import a2l_loss, landmark_loss
from a2l.model import A2LHyperParams, A2LModel, context_forward, identity_forward
from a2l.sequence import LandmarkSequence
from a2l.train import evaluate_a2l, train_a2l

__all__ = [
    'A2LDataset', 'A2LHyperParams', 'A2LModel', 'LandmarkSequence', 'a2l_loss', 'context_forward',
    'evaluate_a2l', 'generate_landmark_sequence', 'identity_forward', 'landmark_loss', 'train_a2l',
]
