"""
Artifact validators, the experiment manifest and the artifact guard
"""

import argparse
import json

import pytest

from commands.experiment import ExperimentManifest, record_artifact
from middleware.artifact_guard import LOCK_NAME, artifact_path, check_artifacts, output_lock, requires_artifacts
from tests.conftest import tiny_config
from utils.errors import DataError, DependencyError
from utils.validators import validate_experiment_manifest, validate_hash, validate_manifest, validate_metrics_report

HASH = 'ab' * 32


def report_dict(**changes):
    data = {
        'schema_version': 1,
        'psnr_mean': 30.0,
        'ssim_mean': 0.9,
        'pixel_mse_temporal': 0.5,
        'tlp': 0.4,
        'tlp_referenced': 0.1,
        'tlp_unreferenced': 0.4,
        'lpips_proxy_mean': 0.2,
        'frames': 3,
        'tlp_mode': 'unreferenced',
        'config_hash': HASH,
        'dataset_hash': None,
        'series': {'psnr': [30.0, 30.0, 30.0], 'tlp': [0.4, 0.4]},
    }
    data.update(changes)
    return data


class TestHash:
    def test_valid(self):
        assert validate_hash(HASH) == (True, None)

    def test_optional_none(self):
        assert validate_hash(None) == (True, None)

    def test_required_none(self):
        assert validate_hash(None, 'config_hash', required=True)[0] is False

    def test_wrong_length(self):
        is_valid, error = validate_hash('abc', 'config_hash')
        assert not is_valid and 'config_hash' in error


class TestMetricsReport:
    def test_valid(self):
        assert validate_metrics_report(report_dict()) == (True, None)

    def test_capped_psnr_is_valid(self):
        assert validate_metrics_report(report_dict(psnr_mean=100.0))[0]

    def test_missing_schema_version(self):
        data = report_dict()
        del data['schema_version']
        assert validate_metrics_report(data) == (False, "Field 'schema_version' is required")

    def test_future_schema(self):
        assert validate_metrics_report(report_dict(schema_version=2))[0] is False

    @pytest.mark.parametrize('field, value', [
        ('tlp', float('nan')),
        ('psnr_mean', 120.0),
        ('ssim_mean', 1.5),
        ('pixel_mse_temporal', -1.0),
        ('frames', 1),
        ('tlp_mode', 'sideways'),
        ('config_hash', 'nothex'),
    ])
    def test_invalid_fields(self, field, value):
        is_valid, error = validate_metrics_report(report_dict(**{field: value}))
        assert not is_valid
        assert field in error

    def test_series_length(self):
        data = report_dict(series={'pixel_mse': [1.0, 2.0, 3.0]})
        is_valid, error = validate_metrics_report(data)
        assert not is_valid and 'pixel_mse' in error

    def test_optional_unavailable_metrics(self):
        assert validate_metrics_report(report_dict(fid=None, lse_c=7.2))[0]
        assert not validate_metrics_report(report_dict(fid='n/a'))[0]


class TestManifest:
    def manifest(self, **changes):
        data = {
            'format_version': 1, 'master_seed': 0, 'height': 64, 'width': 64, 'fps': 25.0,
            'sample_rate': 16000, 'dataset_hash': HASH,
            'clips': [
                {'identity': 'id_000', 'clip': 'clip_000', 'path': 'id_000/clip_000', 'split': 'train', 'frames': 5},
                {'identity': 'id_000', 'clip': 'clip_001', 'path': 'id_000/clip_001', 'split': 'val', 'frames': 5},
            ],
        }
        data.update(changes)
        return data

    def test_valid(self):
        assert validate_manifest(self.manifest()) == (True, None)

    def test_empty_clips(self):
        assert not validate_manifest(self.manifest(clips=[]))[0]

    def test_duplicate_paths(self):
        clips = self.manifest()['clips']
        clips[1]['path'] = clips[0]['path']
        is_valid, error = validate_manifest(self.manifest(clips=clips))
        assert not is_valid and 'twice' in error

    def test_unknown_split(self):
        clips = self.manifest()['clips']
        clips[0]['split'] = 'test'
        assert not validate_manifest(self.manifest(clips=clips))[0]

    def test_missing_hash(self):
        data = self.manifest()
        del data['dataset_hash']
        assert not validate_manifest(data)[0]


class TestExperimentManifest:
    def test_validator(self):
        assert validate_experiment_manifest({'config_hash': HASH, 'checkpoints': {'a2l': 'x.pt'}})[0]
        assert not validate_experiment_manifest({'config_hash': HASH, 'reports': {'r': 3}})[0]
        assert not validate_experiment_manifest({'checkpoints': {}})[0]

    def test_record_and_reload(self, config, tmp_path):
        checkpoint = tmp_path / 'a2l.pt'
        checkpoint.write_bytes(b'x')
        path = record_artifact(config, 'checkpoints', 'a2l', checkpoint)
        data = json.loads(path.read_text())
        assert data['config_hash'] == config.config_hash()
        assert data['checkpoints'] == {'a2l': str(checkpoint)}
        assert ExperimentManifest.load(config).checkpoints == {'a2l': str(checkpoint)}

    def test_missing_file_refused(self, config, tmp_path):
        with pytest.raises(DataError, match='missing'):
            record_artifact(config, 'reports', 'r', tmp_path / 'absent.json')

    def test_other_config_starts_fresh(self, config, tmp_path):
        checkpoint = tmp_path / 'ae.pt'
        checkpoint.write_bytes(b'x')
        record_artifact(config, 'checkpoints', 'ae', checkpoint)
        assert ExperimentManifest.load(config.replace(ddim_steps=2)).checkpoints == {}

    def test_corrupt_manifest(self, config):
        ExperimentManifest.path_for(config.run_dir).parent.mkdir(parents=True)
        ExperimentManifest.path_for(config.run_dir).write_text('{broken')
        with pytest.raises(DataError, match='Corrupt'):
            ExperimentManifest.load(config)


class TestArtifactGuard:
    def test_paths(self, tmp_path):
        config = tiny_config(tmp_path, ablation='no_corr')
        assert artifact_path(config, 'dataset') == tmp_path / 'corpus' / 'manifest.json'
        assert artifact_path(config, 'ae') == tmp_path / 'run' / 'checkpoints' / 'ae.pt'
        assert artifact_path(config, 'l2v') != artifact_path(config.replace(ablation='full'), 'l2v')

    def test_missing_artifacts_listed(self, config):
        with pytest.raises(DependencyError) as info:
            check_artifacts(config, ['ae', 'a2l'])
        assert len(info.value.missing) == 2
        assert info.value.exit_code == 3

    def test_decorator_resolves_paths(self, config):
        path = artifact_path(config, 'ae')
        path.parent.mkdir(parents=True)
        path.write_bytes(b'x')

        @requires_artifacts('ae')
        def command(args, cfg):
            return args.artifacts['ae']

        assert command(argparse.Namespace(), config) == path

    def test_decorator_blocks_before_running(self, config):
        calls = []

        @requires_artifacts('dataset')
        def command(args, cfg):
            calls.append(1)

        with pytest.raises(DependencyError):
            command(argparse.Namespace(), config)
        assert calls == []

    def test_output_lock(self, tmp_path):
        with output_lock(tmp_path / 'out') as directory:
            assert (directory / LOCK_NAME).is_file()
            with pytest.raises(DataError, match='locked'):
                with output_lock(directory):
                    pass
        assert not (tmp_path / 'out' / LOCK_NAME).exists()

    def test_output_lock_unwritable(self, tmp_path):
        blocker = tmp_path / 'file'
        blocker.write_text('x')
        with pytest.raises(DataError):
            with output_lock(blocker / 'out'):
                pass
