"""
Landmark-to-video stage: autoencoder, conditional denoiser, training and synthesis
"""

from l2v.autoencoder import AEHyperParams, Autoencoder, reconstruction_psnr, train_autoencoder
from l2v.components import L2VComponents, l2v_checkpoint_name
from l2v.conditions import ConditionSet, build_conditions, conditions_from_latents
from l2v.landmark_encoder import LandmarkEncoder
from l2v.pipeline import denoise_step, generate_video, synthesize_frame
from l2v.train import L2VData, evaluate_l2v, l2v_loss, train_l2v
from l2v.unet import DenoisingNet, UNetHyperParams

__all__ = [
    'AEHyperParams', 'Autoencoder', 'ConditionSet', 'DenoisingNet', 'L2VComponents', 'L2VData',
    'LandmarkEncoder', 'UNetHyperParams', 'build_conditions', 'conditions_from_latents', 'denoise_step',
    'evaluate_l2v', 'generate_video', 'l2v_checkpoint_name', 'l2v_loss', 'reconstruction_psnr',
    'synthesize_frame', 'train_autoencoder', 'train_l2v',
]
