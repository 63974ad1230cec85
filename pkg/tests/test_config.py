"""
Configuration loading, presets, validation and hashing
"""

from pathlib import Path

import pytest

from config import PRESETS, Config
from utils.errors import ConfigError
from utils.seeding import derive_seed


class TestPresets:
    def test_desk_defaults(self):
        config = Config.load(environ={})
        assert config.preset == 'desk'
        assert (config.height, config.width) == (64, 64)
        assert config.content_dim == config.identity_dim == 32
        assert config.diffusion_steps == 200 and config.ddim_steps == 50
        assert config.n_identities * config.clips_per_identity == 32
        assert config.clip_len_frames == 100

    def test_paper_preset(self):
        config = Config.load(preset='paper', environ={})
        assert (config.height, config.width) == (256, 256)
        assert config.content_dim == config.identity_dim == config.a2l_hidden == 256
        assert config.diffusion_steps == 1000 and config.ddim_steps == 200
        assert config.a2l_lr == pytest.approx(1e-4)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            Config.load(preset='huge', environ={})

    def test_every_preset_validates(self):
        for name in PRESETS:
            assert Config.load(preset=name, environ={}).validate()


class TestSources:
    def test_environment_overrides(self):
        config = Config.load(environ={'TALKHEAD_SEED': '9', 'TALKHEAD_DDIM_STEPS': '20', 'OTHER': 'x'})
        assert config.seed == 9
        assert config.ddim_steps == 20

    def test_file_then_environment_then_arguments(self, tmp_path):
        path = tmp_path / 'run.env'
        path.write_text("SEED=3\nDDIM_STEPS=10\nREFERENCE_LOOP=false\n")
        config = Config.load(path, environ={'TALKHEAD_DDIM_STEPS': '25'}, seed=5)
        assert config.seed == 5
        assert config.ddim_steps == 25
        assert config.reference_loop is False

    def test_preset_from_file(self, tmp_path):
        path = tmp_path / 'run.env'
        path.write_text("PRESET=paper\n")
        assert Config.load(path, environ={}).height == 256

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match='not found'):
            Config.load(tmp_path / 'absent.env', environ={})

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match='BOGUS'):
            Config.load(environ={'TALKHEAD_BOGUS': '1'})

    def test_bad_value(self):
        with pytest.raises(ConfigError, match='HEIGHT'):
            Config.load(environ={'TALKHEAD_HEIGHT': 'tall'})

    def test_none_overrides_are_ignored(self):
        assert Config.load(environ={}, data_dir=None).data_dir == Path('data/corpus')


class TestValidation:
    def test_ddim_steps_above_T(self):
        with pytest.raises(ConfigError, match='ddim_steps'):
            Config.load(environ={}, diffusion_steps=10, ddim_steps=20)

    def test_inverted_betas(self):
        with pytest.raises(ConfigError, match='beta'):
            Config.load(environ={}, beta_start=0.05, beta_end=0.01)

    def test_size_not_divisible_by_factor(self):
        with pytest.raises(ConfigError, match='divisible'):
            Config.load(environ={}, height=30)

    def test_unknown_ablation(self):
        with pytest.raises(ConfigError, match='ablation'):
            Config.load(environ={}, ablation='no_audio')

    def test_all_problems_reported_together(self):
        with pytest.raises(ConfigError) as info:
            Config.load(environ={}, fps=0, workers=0)
        assert 'fps' in str(info.value) and 'workers' in str(info.value)

    def test_replace_revalidates(self):
        config = Config.load(environ={})
        assert config.replace(seed=4).seed == 4
        with pytest.raises(ConfigError):
            config.replace(ddim_steps=0)


class TestHashes:
    def test_paths_do_not_change_config_hash(self):
        a = Config.load(environ={}, data_dir='x', run_dir='y')
        b = Config.load(environ={}, data_dir='z', run_dir='w')
        assert a.config_hash() == b.config_hash()

    def test_hyperparameters_change_config_hash(self):
        a = Config.load(environ={})
        assert a.config_hash() != a.replace(ddim_steps=20).config_hash()

    def test_dataset_hash_ignores_model_settings(self):
        a = Config.load(environ={})
        assert a.dataset_hash() == a.replace(l2v_steps=10, ablation='no_corr').dataset_hash()
        assert a.dataset_hash() != a.replace(seed=1).dataset_hash()

    def test_hashes_are_hex_digests(self):
        config = Config.load(environ={})
        assert len(config.config_hash()) == 64
        int(config.dataset_hash(), 16)


def test_derived_seeds_are_stable_and_distinct():
    assert derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
    assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)
    assert derive_seed(0, 1) != derive_seed(1, 1)
