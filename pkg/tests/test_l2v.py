"""
Autoencoder, condition assembly, denoising UNet, L2V training and video synthesis
"""

import numpy as np
import pytest
import torch

from a2l.model import A2LHyperParams, A2LModel
from audio.features import AudioClip, FeatureConfig
from core.frames import VideoClip, frames_to_tensor, mask_lower_half
from core.landmarks import N_POINTS, Landmark, denormalize_landmarks, inner_lip_gap
from diffusion.process import forward_diffuse
from diffusion.schedule import make_schedule
from l2v.autoencoder import AEHyperParams, Autoencoder, reconstruction_psnr, train_autoencoder
from l2v.components import L2VComponents, l2v_checkpoint_name
from l2v.conditions import ConditionSet, build_conditions, conditions_from_latents
from l2v.landmark_encoder import LandmarkEncoder
from l2v.pipeline import frame_noise, generate_video, reference_index, synthesize_frame
from l2v.train import L2VData, evaluate_l2v, l2v_loss, train_l2v
from l2v.unet import DenoisingNet, UNetHyperParams
from middleware.artifact_guard import artifact_path
from synthdata.dataset import clip_entries, load_clip, load_split
from synthdata.identity import constant_signal
from synthdata.render import lip_bounding_box, measure_mouth_opening
from synthdata.trajectory import sample_trajectory
from utils.errors import ConfigError, ContractViolation, DataError, RangeError

UNET = UNetHyperParams(latent_channels=3, base_channels=8, landmark_dim=16, heads=4)


def latent_batch(batch=2, size=8, seed=0, dtype=torch.float64) -> dict:
    g = torch.Generator().manual_seed(seed)
    shape = (batch, 3, size, size)
    return {
        'z0': torch.randn(shape, generator=g, dtype=dtype),
        'z_p': torch.randn(shape, generator=g, dtype=dtype),
        'z_id': torch.randn(shape, generator=g, dtype=dtype),
        'z_l': torch.randn(shape, generator=g, dtype=dtype),
        'landmarks': 0.5 * torch.randn(batch, 2 * N_POINTS, generator=g, dtype=dtype),
    }


def tiny_modules(params=UNET, seed=0):
    torch.manual_seed(seed)
    return DenoisingNet(params).double(), LandmarkEncoder(params.landmark_dim, 32).double()


def pixel_landmark(rng, size=32) -> Landmark:
    return Landmark(rng.uniform(4, size - 4, size=(N_POINTS, 2)))


class TestAutoencoder:
    def test_desk_latent_shape(self):
        ae = Autoencoder(AEHyperParams(factor=4, latent_channels=3, base_channels=8))
        assert ae.latent_shape(64, 64) == (3, 16, 16)
        assert tuple(ae.encode(torch.zeros(1, 3, 64, 64)).shape) == (1, 3, 16, 16)

    def test_paper_latent_shape(self):
        ae = Autoencoder(AEHyperParams(factor=4, latent_channels=3, base_channels=8))
        assert ae.latent_shape(256, 256) == (3, 64, 64)

    def test_decoder_output_range(self):
        ae = Autoencoder(AEHyperParams(base_channels=8))
        out = ae.decode(torch.randn(2, 3, 8, 8) * 10)
        assert tuple(out.shape) == (2, 3, 32, 32)
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_factor_must_be_power_of_two(self):
        with pytest.raises(ConfigError):
            Autoencoder(AEHyperParams(factor=3))

    def test_indivisible_input(self):
        ae = Autoencoder(AEHyperParams(base_channels=8))
        with pytest.raises(ContractViolation):
            ae.encode(torch.zeros(1, 3, 30, 32))

    def test_latent_scale_gives_unit_std(self, rng):
        ae = Autoencoder(AEHyperParams(base_channels=8))
        frames = torch.as_tensor(rng.uniform(size=(6, 3, 32, 32)), dtype=torch.float32)
        ae.set_latent_scale(frames)
        with torch.no_grad():
            assert float(ae.encode(frames).std()) == pytest.approx(1.0, rel=1e-4)

    def test_training_writes_checkpoint(self, tiny_corpus, tmp_path):
        root, config = tiny_corpus
        frames = frames_to_tensor([f for clip in load_split(root, 'train') for f in clip.video.frames])
        ae, log = train_autoencoder(frames[:8], config, val_frames=frames[8:12], run_dir=tmp_path)
        assert log[-1]['epoch'] == config.ae_epochs
        assert 'val_psnr' in log[-1]
        loaded, payload = Autoencoder.load(tmp_path / 'checkpoints' / 'ae.pt')
        assert float(loaded.latent_scale) == pytest.approx(float(ae.latent_scale))
        assert payload['val_psnr'] is not None
        with torch.no_grad():
            assert torch.allclose(loaded.encode(frames[:2]), ae.encode(frames[:2]), atol=1e-6)

    def test_training_needs_frames(self, config):
        with pytest.raises(ConfigError):
            train_autoencoder(torch.zeros(0, 3, 32, 32), config)


class TestConditions:
    @pytest.fixture
    def parts(self, rng):
        ae = Autoencoder(AEHyperParams(base_channels=8)).eval()
        el = LandmarkEncoder(16, 32).eval()
        frames = rng.uniform(size=(2, 32, 32, 3))
        return ae, el, frames[0], frames[1], pixel_landmark(rng)

    def test_full(self, parts):
        c = build_conditions(*parts, ablation='full')
        assert c.z_l is not None and c.C_l is not None
        assert c.z_p.shape == c.z_id.shape == c.z_l.shape == (1, 3, 8, 8)
        assert tuple(c.C_l.shape) == (1, 16)
        assert len(c.spatial()) == 3

    def test_no_visual(self, parts):
        c = build_conditions(*parts, ablation='no_visual')
        assert c.z_l is None and c.C_l is not None
        assert len(c.spatial()) == 2

    def test_no_corr(self, parts):
        c = build_conditions(*parts, ablation='no_corr')
        assert c.z_l is not None and c.C_l is None

    def test_deterministic(self, parts):
        a, b = build_conditions(*parts), build_conditions(*parts)
        assert torch.equal(a.z_l, b.z_l) and torch.equal(a.C_l, b.C_l)

    def test_unknown_mode(self, parts):
        with pytest.raises(ConfigError):
            build_conditions(*parts, ablation='no_audio')

    def test_shape_mismatch(self):
        with pytest.raises(ContractViolation):
            ConditionSet(torch.zeros(1, 3, 8, 8), torch.zeros(1, 3, 4, 4))

    def test_input_channels_per_mode(self, config):
        full = UNetHyperParams.from_config(config, 'full')
        no_visual = UNetHyperParams.from_config(config, 'no_visual')
        assert full.in_channels - no_visual.in_channels == config.latent_channels
        assert UNetHyperParams.from_config(config, 'no_corr').in_channels == full.in_channels


class TestDenoiser:
    def test_output_shape(self):
        net, el = tiny_modules()
        batch = latent_batch()
        c = conditions_from_latents(batch['z_p'], batch['z_id'], batch['z_l'], batch['landmarks'], el, 'full')
        assert net(batch['z0'], torch.tensor([1, 5]), c).shape == batch['z0'].shape

    def test_scalar_timestep(self):
        net, el = tiny_modules()
        batch = latent_batch()
        c = conditions_from_latents(batch['z_p'], batch['z_id'], batch['z_l'], batch['landmarks'], el, 'full')
        assert torch.equal(net(batch['z0'], torch.tensor(3), c), net(batch['z0'], torch.tensor([3, 3]), c))

    def test_odd_latent_rejected(self):
        net, el = tiny_modules()
        batch = latent_batch(size=7)
        c = conditions_from_latents(batch['z_p'], batch['z_id'], batch['z_l'], batch['landmarks'], el, 'full')
        with pytest.raises(ContractViolation):
            net(batch['z0'], torch.tensor([1, 1]), c)

    def test_visual_mode_must_match(self):
        net, el = tiny_modules()
        batch = latent_batch()
        c = conditions_from_latents(batch['z_p'], batch['z_id'], batch['z_l'], batch['landmarks'], el, 'no_visual')
        with pytest.raises(ContractViolation):
            net(batch['z0'], torch.tensor([1, 1]), c)

    def test_no_corr_leaves_attention_untouched(self):
        net, el = tiny_modules()
        batch = latent_batch()
        loss = l2v_loss(net, el, make_schedule(20), batch, 'no_corr', torch.Generator().manual_seed(0))
        loss.backward()
        assert all(p.grad is None for p in net.attention_parameters().values())
        assert all(p.grad is None for p in el.parameters())
        assert net.stem.weight.grad is not None

    def test_single_token_attention_ignores_queries(self):
        net, el = tiny_modules()
        batch = latent_batch()
        l2v_loss(net, el, make_schedule(20), batch, 'full', torch.Generator().manual_seed(0)).backward()
        grads = net.attention_parameters()
        assert torch.count_nonzero(grads['to_q.weight'].grad) == 0
        assert torch.count_nonzero(grads['to_v.weight'].grad) > 0

    def test_zero_token_differs_from_bypass(self):
        net, _ = tiny_modules()
        batch = latent_batch()
        t = torch.tensor([4, 9])
        zero = ConditionSet(batch['z_p'], batch['z_id'], batch['z_l'], torch.zeros(2, UNET.landmark_dim, dtype=torch.float64))
        bypass = ConditionSet(batch['z_p'], batch['z_id'], batch['z_l'], None)
        with torch.no_grad():
            assert not torch.allclose(net(batch['z0'], t, zero), net(batch['z0'], t, bypass))


class TestLoss:
    def test_matches_manual_wiring(self):
        net, el = tiny_modules()
        schedule = make_schedule(20)
        batch = latent_batch()
        t = torch.tensor([3, 17])
        eps = torch.randn(batch['z0'].shape, generator=torch.Generator().manual_seed(5), dtype=torch.float64)
        loss = l2v_loss(net, el, schedule, batch, 'full', t=t, eps=eps)

        c = ConditionSet(batch['z_p'], batch['z_id'], batch['z_l'], el(batch['landmarks']))
        manual = (eps - net(forward_diffuse(schedule, batch['z0'], t, eps), t, c)).pow(2).mean()
        assert abs(loss.item() - manual.item()) <= 1e-10

    def test_gradient_matches_finite_differences(self):
        net, el = tiny_modules()
        schedule = make_schedule(20)
        batch = latent_batch()
        t = torch.tensor([3, 17])
        eps = torch.randn(batch['z0'].shape, generator=torch.Generator().manual_seed(5), dtype=torch.float64)

        def loss_fn():
            return l2v_loss(net, el, schedule, batch, 'full', t=t, eps=eps)

        loss_fn().backward()
        checks = [(net.out.bias, (0,)), (net.stem.weight, (0, 0, 1, 1)), (el.net[0].weight, (2, 5)),
                  (net.attention.to_v.weight, (1, 3))]
        for param, index in checks:
            analytic = param.grad[index].item()
            h = 1e-6
            with torch.no_grad():
                original = param[index].item()
                param[index] = original + h
                plus = loss_fn().item()
                param[index] = original - h
                minus = loss_fn().item()
                param[index] = original
            numeric = (plus - minus) / (2 * h)
            assert abs(numeric - analytic) <= 1e-3 * max(abs(numeric), 1e-4)


@pytest.fixture(scope='module')
def trained(tiny_corpus, tmp_path_factory):
    """Autoencoder and full-mode L2V trained for a handful of steps on the tiny corpus"""
    root, config = tiny_corpus
    run_dir = tmp_path_factory.mktemp('l2v_run')
    clips = load_split(root, 'train')
    frames = frames_to_tensor([f for clip in clips for f in clip.video.frames])
    ae, _ = train_autoencoder(frames, config, run_dir=run_dir)
    data = L2VData.from_clips(clips, ae)
    components, log = train_l2v(data, ae, config, run_dir=run_dir)
    return config, run_dir, ae, data, components, log


class TestL2VData:
    def test_sizes(self, trained):
        config, _, _, data, _, _ = trained
        assert len(data) == 2 * config.clip_len_frames
        assert tuple(data.z0.shape[1:]) == (3, config.height // 4, config.width // 4)
        assert tuple(data.landmarks.shape[1:]) == (2 * N_POINTS,)

    def test_identity_frames_come_from_the_same_clip(self, trained):
        _, _, _, data, _, _ = trained
        index = torch.arange(len(data))
        other = data.identity_indices(index, torch.Generator().manual_seed(0))
        assert torch.equal(data.clip_start[other], data.clip_start[index])
        assert bool((other != index).all())

    def test_clip_without_landmarks(self, trained):
        _, _, ae, _, _, _ = trained
        with pytest.raises(ConfigError):
            L2VData.from_clips([VideoClip([np.zeros((32, 32, 3))], fps=25.0)], ae)


class TestTrainL2V:
    def test_log_and_checkpoint(self, trained):
        config, run_dir, _, _, _, log = trained
        assert log[0]['step'] == 0 and 'initial_loss' in log[0]
        assert log[-1]['step'] == config.l2v_steps and 'eval_loss' in log[-1]
        assert (run_dir / 'checkpoints' / l2v_checkpoint_name('full')).is_file()
        assert (run_dir / 'logs' / 'l2v.jsonl').is_file()

    def test_one_record_per_step(self, trained):
        config, _, _, _, _, log = trained
        steps = [r['step'] for r in log]
        assert steps == sorted(set(steps))
        assert {'train_loss', 'eval_loss'} <= set(log[-1])

    def test_resume_at_the_end_adds_no_record(self, trained, tmp_path):
        config, _, ae, data, _, _ = trained
        train_l2v(data, ae, config, run_dir=tmp_path, steps=2)
        _, log = train_l2v(data, ae, config, run_dir=tmp_path, resume=True, steps=2)
        assert [r['step'] for r in log] == [0, 1, 2]

    def test_checkpoint_round_trip(self, trained):
        config, run_dir, _, data, components, _ = trained
        loaded = L2VComponents.load(run_dir / 'checkpoints' / 'ae.pt', run_dir / 'checkpoints' / 'l2v.pt')
        assert loaded.ablation == 'full'
        a = evaluate_l2v(components.net, components.el, components.schedule, data, 'full', seed=1)
        b = evaluate_l2v(loaded.net, loaded.el, loaded.schedule, data, 'full', seed=1)
        assert a == pytest.approx(b, rel=1e-5)

    def test_deterministic(self, trained):
        config, _, ae, data, _, log = trained
        _, again = train_l2v(data, ae, config)
        assert [r.get('train_loss') for r in again] == [r.get('train_loss') for r in log]

    def test_resume_continues_step_count(self, trained, tmp_path):
        config, _, ae, data, _, _ = trained
        train_l2v(data, ae, config, run_dir=tmp_path, steps=2)
        _, log = train_l2v(data, ae, config, run_dir=tmp_path, resume=True, steps=4)
        assert [r['step'] for r in log if 'train_loss' in r][-1] == 4

    @pytest.mark.parametrize('ablation', ['no_visual', 'no_corr'])
    def test_ablation_variants(self, trained, tmp_path, ablation):
        config, _, ae, data, _, _ = trained
        components, _ = train_l2v(data, ae, config, run_dir=tmp_path, steps=2, ablation=ablation)
        assert components.ablation == ablation
        assert (tmp_path / 'checkpoints' / l2v_checkpoint_name(ablation)).is_file()
        assert components.net.params.visual_landmarks == (ablation != 'no_visual')

    def test_mismatched_autoencoder_rejected(self, trained, tmp_path):
        config, run_dir, _, _, _, _ = trained
        other = Autoencoder(AEHyperParams(base_channels=8))
        other.latent_scale.fill_(123.0)
        other.save(tmp_path / 'ae.pt', config.config_hash())
        with pytest.raises(DataError):
            L2VComponents.load(tmp_path / 'ae.pt', run_dir / 'checkpoints' / 'l2v.pt')

    @pytest.mark.slow
    def test_overfits_four_frames(self, trained):
        config, _, ae, data, _, _ = trained
        index = torch.arange(4)
        small = L2VData(data.z0[index], data.z_p[index], data.z_l[index], data.landmarks[index],
                        torch.zeros(4, dtype=torch.long), torch.full((4,), 4, dtype=torch.long))
        _, log = train_l2v(small, ae, config, steps=2000)
        assert log[-1]['eval_loss'] < 0.5 * log[0]['eval_loss']


class TestSynthesis:
    def test_reference_index(self):
        assert reference_index(3, 5, loop=False) == 3
        assert reference_index(7, 5, loop=True) == 2
        with pytest.raises(RangeError):
            reference_index(5, 5, loop=False)

    def test_frame_noise_is_reproducible(self):
        assert torch.equal(frame_noise((3, 8, 8), 0, 4), frame_noise((3, 8, 8), 0, 4))
        assert not torch.equal(frame_noise((3, 8, 8), 0, 4), frame_noise((3, 8, 8), 0, 5))

    def test_synthesize_frame(self, trained, tiny_corpus):
        root, _ = tiny_corpus
        config, _, _, _, components, _ = trained
        clip = load_clip(root / clip_entries(root, 'val')[0]['path']).video
        z_T = frame_noise(components.ae.latent_shape(config.height, config.width), 0, 0)
        args = (components.net, components.el, components.ae, components.schedule,
                clip.frames[0], clip.frames[1], clip.landmarks[0])
        a = synthesize_frame(*args, steps=config.ddim_steps, z_T=z_T)
        b = synthesize_frame(*args, steps=config.ddim_steps, z_T=z_T)
        assert a.shape == (config.height, config.width, 3)
        assert a.min() >= 0.0 and a.max() <= 1.0
        assert np.array_equal(a, b)

    def test_identity_frame_changes_output(self, trained, tiny_corpus):
        root, _ = tiny_corpus
        config, _, _, _, components, _ = trained
        entries = clip_entries(root, 'val')
        clip = load_clip(root / entries[0]['path']).video
        stranger = load_clip(root / entries[-1]['path']).video
        z_T = frame_noise(components.ae.latent_shape(config.height, config.width), 0, 0)
        frames = [
            synthesize_frame(components.net, components.el, components.ae, components.schedule,
                             clip.frames[0], x_id, clip.landmarks[0], steps=config.ddim_steps, z_T=z_T)
            for x_id in (clip.frames[1], stranger.frames[5])
        ]
        assert np.abs(frames[0] - frames[1]).max() > 0.0

    def generate(self, trained, tiny_corpus, seconds, **changes):
        root, _ = tiny_corpus
        config, _, _, _, components, _ = trained
        config = config.replace(**changes)
        reference = load_clip(root / clip_entries(root, 'val')[0]['path']).video
        torch.manual_seed(0)
        a2l = A2LModel(A2LHyperParams.from_config(config)).eval()
        audio = AudioClip(np.random.default_rng(0).uniform(-0.2, 0.2, int(seconds * 16000)), 16000)
        return generate_video(a2l, components.eval(), audio, reference, config, FeatureConfig.from_config(config))

    def test_video_length_and_landmarks(self, trained, tiny_corpus):
        clip = self.generate(trained, tiny_corpus, 0.4)
        assert len(clip) == 10
        assert len(clip.landmarks) == 10
        assert clip.meta['ablation'] == 'full'

    def test_generation_is_deterministic(self, trained, tiny_corpus):
        a = self.generate(trained, tiny_corpus, 0.2)
        b = self.generate(trained, tiny_corpus, 0.2)
        assert all(np.array_equal(x, y) for x, y in zip(a.frames, b.frames))

    def test_seed_changes_output(self, trained, tiny_corpus):
        a = self.generate(trained, tiny_corpus, 0.2)
        b = self.generate(trained, tiny_corpus, 0.2, seed=7)
        assert not np.array_equal(a.frames[0], b.frames[0])

    def test_reference_loops(self, trained, tiny_corpus):
        assert len(self.generate(trained, tiny_corpus, 0.64)) == 16

    def test_short_reference_without_loop(self, trained, tiny_corpus):
        with pytest.raises(RangeError):
            self.generate(trained, tiny_corpus, 0.64, reference_loop=False)

    def test_reference_without_landmarks(self, trained):
        config, _, _, _, components, _ = trained
        reference = VideoClip([np.zeros((32, 32, 3))] * 3, fps=25.0)
        with pytest.raises(DataError):
            generate_video(None, components, AudioClip(np.zeros(16000), 16000), reference, config,
                           FeatureConfig.from_config(config))


def mouth_pose(clip, opening) -> Landmark:
    """Pixel landmark of the clip's face with the mouth held at `opening`"""
    video = clip.video
    canonical = sample_trajectory(clip.identity, constant_signal(1, video.fps, opening))[0]
    return denormalize_landmarks(canonical, video.height, video.width)


@pytest.mark.slow
class TestDeskAcceptance:
    """Trained desk-preset autoencoder and denoiser on held-out clips"""

    @pytest.fixture(scope='class')
    def desk(self, desk_run):
        config = desk_run.load_config()
        components = L2VComponents.load(artifact_path(config, 'ae'), artifact_path(config, 'l2v'))
        return config, components.eval(), load_split(config.data_dir, 'val')

    def test_autoencoder_reconstructs_held_out_frames(self, desk):
        _, components, clips = desk
        frames = frames_to_tensor([f for clip in clips for f in clip.video.frames], components.ae.dtype)
        assert reconstruction_psnr(components.ae, frames) > 30.0

    def test_mouth_opening_follows_landmark_condition(self, desk):
        config, components, clips = desk
        latent_shape = components.ae.latent_shape(config.height, config.width)
        rng = np.random.default_rng(0)
        measured, gaps = [], []
        for i in range(100):
            clip = clips[i % len(clips)]
            video = clip.video
            pose, reference = rng.choice(len(video), size=2, replace=False)
            target = mouth_pose(clip, rng.uniform(0.0, 1.0))
            frame = synthesize_frame(components.net, components.el, components.ae, components.schedule,
                                     mask_lower_half(video.frames[pose]), video.frames[reference], target,
                                     steps=config.ddim_steps, z_T=frame_noise(latent_shape, config.seed, i))
            measured.append(measure_mouth_opening(frame, lip_bounding_box(target, mouth_pose(clip, 1.0))))
            gaps.append(inner_lip_gap(target))
        assert np.corrcoef(measured, gaps)[0, 1] > 0.7
