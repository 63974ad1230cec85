"""
Diffusion mathematics shared by pixel- and latent-space models
"""

from diffusion.process import Denoiser, diffusion_loss, forward_diffuse, forward_step, predict_x0, sample_timesteps
from diffusion.samplers import ddim_sample, ddim_timesteps, ddpm_sample
from diffusion.schedule import NoiseSchedule, make_schedule, schedule_from_config

__all__ = [
    'Denoiser', 'NoiseSchedule', 'ddim_sample', 'ddim_timesteps', 'ddpm_sample', 'diffusion_loss',
    'forward_diffuse', 'forward_step', 'make_schedule', 'predict_x0', 'sample_timesteps', 'schedule_from_config',
]
