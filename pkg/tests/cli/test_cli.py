import json
import os

import numpy as np
import pytest
from compas.data import json_load

import compas_mepoly
from compas_mepoly.cli import DEFAULTS
from compas_mepoly.cli import RunConfig
from compas_mepoly.cli import main
from compas_mepoly.exceptions import LayoutError
from compas_mepoly.networks import load_checkpoint
from compas_mepoly.networks import load_natural_params
from compas_mepoly.networks import save_natural_params
from compas_mepoly.polynomials import NaturalParams
from compas_mepoly.polynomials import PolyDistribution
from compas_mepoly.utilities import read_csv_to_dictionary
from compas_mepoly.utilities import read_pgm

SMALL_FIT = ['--order', '2', '--grid-size', '16']


def read_bytes(path):
    with open(path, 'rb') as f:
        return f.read()


def write_json(path, document):
    with open(str(path), 'w') as f:
        json.dump(document, f)
    return str(path)


@pytest.fixture
def uniform_checkpoint(tmp_path):
    distribution = PolyDistribution.from_settings(dim=2, order=2, grid_size=8)
    path = str(tmp_path / 'uniform.json')
    save_natural_params(path, NaturalParams.zeros(distribution.feature_count), distribution.settings)
    return path


def test_version(capsys):
    assert main(['version']) == 0
    assert 'COMPAS MEPOLY' in capsys.readouterr().out


def test_unknown_flag_is_a_usage_error(tmp_path):
    assert main(['fit', '--out', str(tmp_path), '--no-such-flag']) == 2


def test_missing_command_is_a_usage_error():
    assert main([]) == 2


def test_sample_without_checkpoint(tmp_path):
    assert main(['sample', '--out', str(tmp_path)]) == 2


def test_missing_checkpoint_file(tmp_path):
    assert main(['density', '--out', str(tmp_path), '--checkpoint', str(tmp_path / 'absent.json')]) == 2


def test_missing_samples_file(tmp_path):
    missing = str(tmp_path / 'absent.csv')
    assert main(['fit', '--out', str(tmp_path / 'out'), '--samples', missing] + SMALL_FIT) == 2


def test_unknown_config_setting(tmp_path):
    config = write_json(tmp_path / 'config.json', {'order': 2, 'learning_rate': 0.1})
    assert main(['fit', '--config', config, '--out', str(tmp_path / 'out')]) == 2


def test_config_syntax_error_names_the_line(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{\n  "order": 2,\n  "alpha" 0.1\n}\n')
    with pytest.raises(LayoutError) as error:
        RunConfig.resolve('fit', str(path))
    assert error.value.line == 3


def test_flags_override_config(tmp_path):
    config = write_json(tmp_path / 'config.json', {'order': 3, 'alpha': 0.2})
    resolved = RunConfig.resolve('fit', config, {'order': 5, 'seed': None})
    assert resolved['order'] == 5
    assert resolved['alpha'] == 0.2
    assert resolved['seed'] == DEFAULTS['fit']['seed']


def test_fit_writes_outputs(tmp_path):
    out = str(tmp_path / 'fit')
    assert main(['fit', '--out', out, '--alpha', '0.5'] + SMALL_FIT) == 0
    for name in ('lambda.json', 'fit-report.json', 'density.csv', 'density.pgm', 'resolved-config.json'):
        assert os.path.isfile(os.path.join(out, name)), name

    params, settings = load_natural_params(os.path.join(out, 'lambda.json'))
    assert params.feature_count == 6
    assert settings['order'] == 2
    assert settings['grid_size'] == 16

    resolved = json_load(os.path.join(out, 'resolved-config.json'))
    assert resolved['command'] == 'fit'
    assert resolved['values']['alpha'] == 0.5
    assert resolved['values']['manifold'] == 'two_moons'

    columns = read_csv_to_dictionary(os.path.join(out, 'density.csv'))
    assert sorted(columns) == ['density', 'x0', 'x1']
    assert len(columns['density']) == 16 * 16
    assert read_pgm(os.path.join(out, 'density.pgm')).shape == (16, 16)


def test_fit_is_deterministic(tmp_path):
    first, second = str(tmp_path / 'first'), str(tmp_path / 'second')
    for out in (first, second):
        assert main(['fit', '--out', out, '--seed', '3'] + SMALL_FIT) == 0
    for name in ('lambda.json', 'fit-report.json', 'density.csv', 'density.pgm'):
        assert read_bytes(os.path.join(first, name)) == read_bytes(os.path.join(second, name)), name


def test_fit_with_convergence_sweep(tmp_path):
    out = str(tmp_path / 'sweep')
    assert main(['fit', '--out', out, '--orders', '2,3', '--alpha', '0.5'] + SMALL_FIT) == 0
    columns = read_csv_to_dictionary(os.path.join(out, 'convergence.csv'))
    assert columns['order'] == ['2', '3']


def test_unconverged_fit_still_writes_outputs(tmp_path):
    config = write_json(tmp_path / 'config.json', {'max_iters': 1})
    out = str(tmp_path / 'short')
    assert main(['fit', '--config', config, '--out', out, '--alpha', '0.5'] + SMALL_FIT) == 0
    report = json_load(os.path.join(out, 'fit-report.json'))
    assert report['converged'] is False
    assert report['message'] == 'reached max_iters=1'
    assert os.path.isfile(os.path.join(out, 'lambda.json'))


def test_density_of_uniform_checkpoint_is_white(tmp_path, uniform_checkpoint):
    out = str(tmp_path / 'density')
    assert main(['density', '--out', out, '--checkpoint', uniform_checkpoint]) == 0
    image = read_pgm(os.path.join(out, 'density.pgm'))
    assert image.shape == (8, 8)
    assert np.all(image == 255)
    density = np.array(read_csv_to_dictionary(os.path.join(out, 'density.csv'))['density'], dtype=float)
    assert np.allclose(density, 0.25)


def test_sample_then_fit(tmp_path, uniform_checkpoint):
    samples_out = str(tmp_path / 'samples')
    assert main(['sample', '--out', samples_out, '--checkpoint', uniform_checkpoint, '-n', '500', '--seed', '1']) == 0
    samples_path = os.path.join(samples_out, 'samples.csv')
    columns = read_csv_to_dictionary(samples_path)
    assert sorted(columns) == ['a0', 'a1', 'log_prob']
    assert len(columns['a0']) == 500
    assert np.allclose(np.array(columns['log_prob'], dtype=float), np.log(0.25))

    fit_out = str(tmp_path / 'fit')
    assert main(['fit', '--out', fit_out, '--samples', samples_path] + SMALL_FIT) == 0
    params, settings = load_natural_params(os.path.join(fit_out, 'lambda.json'))
    assert settings['dim'] == 2
    assert np.max(np.abs(params.values)) < 1.0


def test_bandit_run(tmp_path):
    out = str(tmp_path / 'bandit')
    argv = ['bandit', '--out', out, '--steps', '5', '--batch-size', '16', '--alpha', '0.5'] + SMALL_FIT
    assert main(argv) == 0
    for name in ('lambda.json', 'kl-trace.csv', 'bandit-report.json', 'density.csv', 'density.pgm'):
        assert os.path.isfile(os.path.join(out, name)), name
    trace = read_csv_to_dictionary(os.path.join(out, 'kl-trace.csv'))
    assert len(trace['step']) == 5
    report = json_load(os.path.join(out, 'bandit-report.json'))
    assert report['kl'] >= 0.0
    assert len(report['mode_mass']) == 2
    _, settings = load_natural_params(os.path.join(out, 'lambda.json'))
    assert settings['clip'] == DEFAULTS['bandit']['clip']


def test_navigate_run_from_config(tmp_path):
    config = write_json(tmp_path / 'navigate.json', {
        'order': 2,
        'grid_size': 8,
        'envs': 2,
        'rollout_steps': 16,
        'minibatch_size': 8,
        'epochs': 1,
        'hidden_sizes': [8],
        'total_steps': 64,
        'episodes': 3,
    })
    out = str(tmp_path / 'navigate')
    assert main(['--quiet', 'navigate', '--config', config, '--out', out]) == 0
    for name in ('metrics.csv', 'policy.ckpt', 'value.ckpt', 'trajectories.csv', 'terminal-histogram.csv', 'evaluation.json'):
        assert os.path.isfile(os.path.join(out, name)), name

    metrics = read_csv_to_dictionary(os.path.join(out, 'metrics.csv'))
    assert len(metrics['update']) == 2
    evaluation = json_load(os.path.join(out, 'evaluation.json'))
    assert sum(evaluation['cause_counts'].values()) == 3

    policy = load_checkpoint(os.path.join(out, 'policy.ckpt'))
    assert policy.sizes == [2, 8, 6]


@pytest.mark.parametrize('command, filename', [('bandit', 'configs/bandit_default.json'), ('navigate', 'configs/ppo_default.json')])
def test_shipped_configs_match_defaults(command, filename):
    resolved = RunConfig.resolve(command, compas_mepoly.get(filename))
    assert resolved.values == DEFAULTS[command]
