"""
Landmark Reconstruction Loss
Sum of squared point errors over frames and points, averaged over the batch
"""

import numpy as np
import torch

from a2l.sequence import LandmarkSequence
from utils.errors import ContractViolation


def landmark_loss(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """
    Batched loss on (B, K, 136) tensors

    Example:
        >>> landmark_loss(torch.zeros(2, 3, 136), torch.zeros(2, 3, 136))
        tensor(0.)
    """
    if pred.shape != target.shape:
        raise ContractViolation(f"Prediction shape {tuple(pred.shape)} != target shape {tuple(target.shape)}")
    return (pred - target).pow(2).flatten(1).sum(dim=1).mean()


def a2l_loss(pred: LandmarkSequence, gt: LandmarkSequence) -> float:
    """Loss between two single sequences (batch of one)"""
    if len(pred) != len(gt):
        raise ContractViolation(f"Sequence lengths differ: {len(pred)} vs {len(gt)}")
    return float(np.sum((pred.as_array() - gt.as_array()) ** 2))


def combined_loss(intermediate, final, target, intermediate_weight: float) -> torch.Tensor:
    """Final-stage loss plus weighted supervision of the context stage"""
    loss = landmark_loss(final, target)
    if intermediate_weight:
        loss = loss + intermediate_weight * landmark_loss(intermediate, target)
    return loss
