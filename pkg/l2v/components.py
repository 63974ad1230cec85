"""
Trained L2V Components
Autoencoder, denoiser, landmark encoder and schedule travelling together
"""

from dataclasses import asdict, dataclass
from pathlib import Path

from diffusion.schedule import NoiseSchedule
from l2v.autoencoder import Autoencoder
from l2v.conditions import check_ablation
from l2v.landmark_encoder import LandmarkEncoder
from l2v.unet import DenoisingNet, UNetHyperParams
from utils.checkpoints import load_checkpoint, save_checkpoint
from utils.errors import DataError

COMPONENT = 'l2v'


def l2v_checkpoint_name(ablation: str) -> str:
    return 'l2v.pt' if ablation == 'full' else f"l2v_{ablation}.pt"


@dataclass
class L2VComponents:
    ae: Autoencoder
    net: DenoisingNet
    el: LandmarkEncoder
    schedule: NoiseSchedule
    ablation: str = 'full'

    def __post_init__(self):
        check_ablation(self.ablation)

    def eval(self) -> 'L2VComponents':
        for module in (self.ae, self.net, self.el):
            module.eval()
        return self

    def save(self, path, config_hash: str, **extras) -> Path:
        """Denoiser and landmark encoder; the autoencoder keeps its own checkpoint"""
        return save_checkpoint(
            path, COMPONENT,
            {'net': self.net.state_dict(), 'el': self.el.state_dict()},
            config_hash,
            {'unet': asdict(self.net.params), 'landmark_dim': self.el.landmark_dim, 'el_hidden': self.el.hidden},
            schedule=self.schedule.to_dict(), ablation=self.ablation,
            ae_latent_scale=float(self.ae.latent_scale), **extras,
        )

    @classmethod
    def load(cls, ae_path, l2v_path) -> 'L2VComponents':
        ae, _ = Autoencoder.load(ae_path)
        payload = load_checkpoint(l2v_path, COMPONENT)
        if abs(payload['ae_latent_scale'] - float(ae.latent_scale)) > 1e-6 * max(1.0, float(ae.latent_scale)):
            raise DataError(f"{l2v_path} was trained against a different autoencoder than {ae_path}")
        config = payload['config']
        net = DenoisingNet(UNetHyperParams(**config['unet']))
        net.load_state_dict(payload['state_dict']['net'])
        el = LandmarkEncoder(config['landmark_dim'], config['el_hidden'])
        el.load_state_dict(payload['state_dict']['el'])
        return cls(ae, net, el, NoiseSchedule.from_dict(payload['schedule']), payload['ablation']).eval()
