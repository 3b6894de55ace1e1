"""Command line interface of ``compas_mepoly``.

Every subcommand writes its outputs and a ``resolved-config.json`` into the
directory given by ``--out``. Settings are resolved from built-in defaults,
then a ``--config`` JSON document, then explicit flags.

Exit codes are 0 on success, 1 on numerical failure and 2 on usage or I/O
errors. A fit that stops at ``max_iters`` or at the parameter clip bound is
not a failure: ``fit`` still writes its outputs and exits 0, with
``"converged": false`` and the stopping reason in ``fit-report.json``.
"""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import argparse
import json
import logging
import os
import platform
import sys

import compas
import numpy as np
from compas.data import Data
from compas.data import json_dump
from compas.data import json_loads

import compas_mepoly
from compas_mepoly.environments import MANIFOLD_KINDS
from compas_mepoly.environments import BanditEnv
from compas_mepoly.environments import load_named_layout
from compas_mepoly.environments import make_manifold
from compas_mepoly.environments import mode_mass
from compas_mepoly.environments import write_trajectory_csv
from compas_mepoly.exceptions import CheckpointError
from compas_mepoly.exceptions import LayoutError
from compas_mepoly.exceptions import MePolyError
from compas_mepoly.exceptions import NumericalError
from compas_mepoly.fitting import FitConfig
from compas_mepoly.fitting import ManifoldReward
from compas_mepoly.fitting import boltzmann_target
from compas_mepoly.fitting import convergence_sweep
from compas_mepoly.fitting import fit_mle
from compas_mepoly.fitting import fit_moments
from compas_mepoly.fitting import grid_moments
from compas_mepoly.fitting import histogram_density
from compas_mepoly.fitting import write_sweep_csv
from compas_mepoly.networks import load_natural_params
from compas_mepoly.networks import save_checkpoint
from compas_mepoly.networks import save_natural_params
from compas_mepoly.polynomials import FEATURE_KINDS
from compas_mepoly.polynomials import PolyDistribution
from compas_mepoly.training import KL_TRACE_HEADER
from compas_mepoly.training import METRIC_HEADER
from compas_mepoly.training import BanditConfig
from compas_mepoly.training import BanditTrainer
from compas_mepoly.training import PpoConfig
from compas_mepoly.training import PpoTrainer
from compas_mepoly.training import write_terminal_histogram
from compas_mepoly.utilities import LOG
from compas_mepoly.utilities import ensure_directory
from compas_mepoly.utilities import read_csv_to_dictionary
from compas_mepoly.utilities import set_log_level
from compas_mepoly.utilities import write_csv
from compas_mepoly.utilities import write_pgm

__all__ = [
    'COMMANDS',
    'DEFAULTS',
    'RunConfig',
    'build_parser',
    'cmd_bandit',
    'cmd_density',
    'cmd_fit',
    'cmd_navigate',
    'cmd_sample',
    'main',
]

_COMMON = {'seed': 0, 'out': 'mepoly-out'}

DEFAULTS = {
    'fit': dict(_COMMON, manifold='two_moons', samples=None, order=6, orders=None, grid_size=64, kind='legendre',
                alpha=0.05, sigma=0.05, points=2000, max_iters=5000, grad_tol=1e-6),
    'bandit': dict(_COMMON, manifold='two_moons', order=22, grid_size=12, clip=1000.0, sigma=0.05, points=2000,
                   **BanditConfig().data),
    'navigate': dict(_COMMON, layout='two_goals', order=4, grid_size=32, episodes=100, **PpoConfig().data),
    'sample': dict(_COMMON, checkpoint=None, count=1000, jitter=False),
    'density': dict(_COMMON, checkpoint=None),
    'version': {},
}

COMMANDS = tuple(DEFAULTS)


class RunConfig(Data):
    """Fully resolved settings of one subcommand run.

    Parameters
    ----------
    command : :obj:`str`
    values : :obj:`dict`
    """

    def __init__(self, command='fit', values=None, name=None):
        super(RunConfig, self).__init__(name=name)
        if command not in DEFAULTS:
            raise ValueError('Unknown command {!r}'.format(command))
        self.command = command
        self.values = dict(DEFAULTS[command])
        self.values.update(values or {})

    @classmethod
    def resolve(cls, command, config_path=None, flags=None):
        """Merge defaults, a JSON config document and explicit flags, in that order.

        Parameters
        ----------
        command : :obj:`str`
        config_path : :obj:`str`, optional
            Flat JSON object of settings of this command.
        flags : :obj:`dict`, optional
            Explicitly given flags; ``None`` values are ignored.

        Returns
        -------
        :class:`RunConfig`

        Raises
        ------
        :class:`compas_mepoly.exceptions.LayoutError`
            If the document does not parse or names an unknown setting.
        """
        values = {}
        if config_path:
            values.update(read_config(config_path, DEFAULTS[command]))
        values.update({key: value for key, value in (flags or {}).items() if value is not None})
        return cls(command, values)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def data(self):
        return {'command': self.command, 'values': self.values}

    @data.setter
    def data(self, data):
        self.command = data['command']
        self.values = dict(DEFAULTS[self.command])
        self.values.update(data['values'])

    def write(self, directory):
        path = os.path.join(ensure_directory(directory), 'resolved-config.json')
        json_dump(self.data, path, pretty=True)
        return path


def read_config(path, allowed):
    """Read a flat JSON settings document, rejecting settings not in ``allowed``."""
    with open(path, 'r') as f:
        text = f.read()
    try:
        document = json_loads(text)
    except json.JSONDecodeError as error:
        raise LayoutError('{} (column {})'.format(error.msg, error.colno), line=error.lineno, source=path)
    if not isinstance(document, dict):
        raise LayoutError('expected a JSON object of settings', source=path)
    for key in document:
        if key not in allowed:
            raise LayoutError('unknown setting', field=key, source=path)
    return document


# ------------------------------------------------------------------------------
# outputs
# ------------------------------------------------------------------------------

def _write_density(out, distribution, params):
    points, density = distribution.density_rows(params)
    header = ['x{}'.format(i) for i in range(distribution.dim)] + ['density']
    write_csv(os.path.join(out, 'density.csv'), header, np.column_stack([points, density]).tolist())
    if distribution.dim <= 2 and distribution.grid.kind == 'full':
        write_pgm(os.path.join(out, 'density.pgm'), distribution.density_image(params))
    else:
        LOG.info('No density image for a %dD distribution.', distribution.dim)


def _distribution_from_checkpoint(path):
    params, settings = load_natural_params(path)
    try:
        distribution = PolyDistribution.from_settings(**settings)
    except TypeError as error:
        raise CheckpointError('{}: invalid distribution settings ({})'.format(path, error))
    if distribution.feature_count != params.feature_count:
        raise CheckpointError('{}: {} parameters for {} features'.format(path, params.feature_count, distribution.feature_count))
    return distribution, params


def _read_samples(path):
    columns = read_csv_to_dictionary(path)
    names = sorted((name for name in columns if name.startswith('a') and name[1:].isdigit()), key=lambda name: int(name[1:]))
    if not names:
        names = [name for name in columns if name != 'log_prob']
    try:
        return np.array([[float(value) for value in columns[name]] for name in names]).T
    except ValueError as error:
        raise ValueError("'{}' holds non-numeric samples ({})".format(path, error))


def _orders(text):
    if text is None or isinstance(text, list):
        return text
    return [int(order) for order in str(text).split(',') if order.strip()]


# ------------------------------------------------------------------------------
# subcommands
# ------------------------------------------------------------------------------

def cmd_fit(config):
    """Fit a distribution to a manifold's Boltzmann target or to a sample file.

    Returns 0 also when the fit did not converge; the report carries the reason.
    """
    out = ensure_directory(config['out'])
    fit_config = FitConfig(max_iters=config['max_iters'], grad_tol=config['grad_tol'])
    if config['samples']:
        samples = _read_samples(config['samples'])
        distribution = PolyDistribution.from_settings(samples.shape[1], config['order'], config['grid_size'],
                                                      kind=config['kind'], seed=config['seed'])
        params, report = fit_mle(samples, distribution.basis, distribution.grid, fit_config,
                                 kind=config['kind'], table=distribution.table)
        target = histogram_density(samples, distribution.grid)
    else:
        points = make_manifold(config['manifold'], config['points'], rng=config['seed'])
        distribution = PolyDistribution.from_settings(2, config['order'], config['grid_size'], kind=config['kind'])
        target = boltzmann_target(ManifoldReward(points, config['sigma']), distribution.grid, config['alpha'])
        moments = grid_moments(target, distribution.table)
        params, report = fit_moments(moments, distribution.basis, distribution.grid, fit_config,
                                     kind=config['kind'], table=distribution.table)

    save_natural_params(os.path.join(out, 'lambda.json'), params, distribution.settings)
    json_dump(report.data, os.path.join(out, 'fit-report.json'), pretty=True)
    _write_density(out, distribution, params)

    orders = _orders(config['orders'])
    if orders:
        rows = convergence_sweep(target, orders, distribution.grid, fit_config, kind=config['kind'])
        write_sweep_csv(os.path.join(out, 'convergence.csv'), rows)
    LOG.info('Fit written to %s (converged: %s).', out, report.converged)
    return 0


def cmd_bandit(config):
    """Train natural parameters on a manifold bandit."""
    out = ensure_directory(config['out'])
    env = BanditEnv.from_manifold(config['manifold'], config['points'], seed=config['seed'],
                                  sigma=config['sigma'], alpha=config['alpha'])
    distribution = PolyDistribution.from_settings(2, config['order'], config['grid_size'], clip=config['clip'])
    bandit_config = BanditConfig(**{key: config[key] for key in BanditConfig().data})
    trainer = BanditTrainer(env, distribution, bandit_config, seed=config['seed'])
    rows = trainer.train()

    masses = distribution.masses(trainer.params)
    modes = mode_mass(masses, distribution.grid.points, env.target_points, env.labels, 3 * env.sigma)
    summary = {
        'kl': trainer.kl_to_target(),
        'entropy': float(distribution.entropy(trainer.params)),
        'mode_mass': modes.tolist(),
    }
    save_natural_params(os.path.join(out, 'lambda.json'), trainer.params, distribution.settings)
    write_csv(os.path.join(out, 'kl-trace.csv'), KL_TRACE_HEADER, rows)
    json_dump(summary, os.path.join(out, 'bandit-report.json'), pretty=True)
    _write_density(out, distribution, trainer.params)
    LOG.info('Bandit training written to %s (kl %.4f).', out, summary['kl'])
    return 0


def cmd_navigate(config):
    """Train a PPO policy in a Smooth World layout and evaluate it."""
    out = ensure_directory(config['out'])
    world = load_named_layout(config['layout'])
    distribution = PolyDistribution.from_settings(2, config['order'], config['grid_size'])
    ppo_config = PpoConfig(**{key: config[key] for key in PpoConfig().data})
    trainer = PpoTrainer(world, distribution, ppo_config, seed=config['seed'])
    rows = trainer.train()
    write_csv(os.path.join(out, 'metrics.csv'), METRIC_HEADER, rows)
    save_checkpoint(trainer.policy.policy_params, os.path.join(out, 'policy.ckpt'))
    save_checkpoint(trainer.policy.value_params, os.path.join(out, 'value.ckpt'))

    metrics = trainer.evaluate(config['episodes'], rng=config['seed'] + 1, record=True)
    write_trajectory_csv(os.path.join(out, 'trajectories.csv'), metrics['trajectories'])
    write_terminal_histogram(os.path.join(out, 'terminal-histogram.csv'), metrics['terminal_positions'])
    summary = {key: metrics[key] for key in ('mean_return', 'success_rate', 'goal_counts', 'goals_reached', 'cause_counts', 'clusters')}
    json_dump(summary, os.path.join(out, 'evaluation.json'), pretty=True)
    LOG.info('Navigation run written to %s: success %.2f, %d goals reached.', out, summary['success_rate'], summary['goals_reached'])
    return 0


def cmd_sample(config):
    """Draw samples from a natural-parameter checkpoint."""
    if not config['checkpoint']:
        raise ValueError('sample needs --checkpoint')
    out = ensure_directory(config['out'])
    distribution, params = _distribution_from_checkpoint(config['checkpoint'])
    rng = np.random.default_rng(config['seed'])
    actions, log_probs = distribution.sample(params, rng, size=config['count'], jitter=config['jitter'])
    header = ['a{}'.format(i) for i in range(distribution.dim)] + ['log_prob']
    write_csv(os.path.join(out, 'samples.csv'), header, np.column_stack([actions, log_probs]).tolist())
    LOG.info('%d samples written to %s.', config['count'], out)
    return 0


def cmd_density(config):
    """Export the grid density of a natural-parameter checkpoint."""
    if not config['checkpoint']:
        raise ValueError('density needs --checkpoint')
    out = ensure_directory(config['out'])
    distribution, params = _distribution_from_checkpoint(config['checkpoint'])
    if distribution.dim > 2:
        raise ValueError('density export supports 1D and 2D distributions, got {}D'.format(distribution.dim))
    _write_density(out, distribution, params)
    return 0


def cmd_version(config):
    print('COMPAS MEPOLY: {}'.format(compas_mepoly.__version__))
    print('COMPAS: {}'.format(compas.__version__))
    print('numpy: {}'.format(np.__version__))
    print('Python: {} ({})'.format(platform.python_version(), platform.python_implementation()))
    return 0


_HANDLERS = {
    'fit': cmd_fit,
    'bandit': cmd_bandit,
    'navigate': cmd_navigate,
    'sample': cmd_sample,
    'density': cmd_density,
    'version': cmd_version,
}


# ------------------------------------------------------------------------------
# parser
# ------------------------------------------------------------------------------

def _common(parser):
    parser.add_argument('--config', help='JSON document of settings, overridden by flags')
    parser.add_argument('--seed', type=int, help='random seed (default 0)')
    parser.add_argument('--out', help='output directory (default mepoly-out)')


def _distribution_flags(parser):
    parser.add_argument('--order', type=int, help='total degree of the polynomial basis')
    parser.add_argument('--grid-size', dest='grid_size', type=int, help='quadrature nodes per axis')


def build_parser():
    parser = argparse.ArgumentParser(prog='mepoly', description='Maximum-entropy polynomial distributions and policies.')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='log debug messages')
    verbosity.add_argument('--quiet', action='store_true', help='log warnings and errors only')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    fit = commands.add_parser('fit', help='fit a distribution to a manifold target or to samples')
    _common(fit)
    _distribution_flags(fit)
    fit.add_argument('--manifold', choices=MANIFOLD_KINDS)
    fit.add_argument('--samples', help='CSV of samples, columns a0, a1, ...')
    fit.add_argument('--orders', help='comma separated orders of a convergence sweep, e.g. 2,4,6,8')
    fit.add_argument('--kind', choices=FEATURE_KINDS)
    fit.add_argument('--alpha', type=float, help='temperature of the manifold target')

    bandit = commands.add_parser('bandit', help='train on a single-state manifold bandit')
    _common(bandit)
    _distribution_flags(bandit)
    bandit.add_argument('--manifold', choices=MANIFOLD_KINDS)
    bandit.add_argument('--alpha', type=float, help='entropy temperature')
    bandit.add_argument('--steps', type=int, help='number of updates')
    bandit.add_argument('--batch-size', dest='batch_size', type=int)
    bandit.add_argument('--lr', type=float)
    bandit.add_argument('--clip', type=float, help='bound on every natural parameter')

    navigate = commands.add_parser('navigate', help='train a PPO policy in a Smooth World layout')
    _common(navigate)
    _distribution_flags(navigate)
    navigate.add_argument('--layout', help='shipped layout name or layout file')
    navigate.add_argument('--steps', dest='total_steps', type=int, help='environment steps of training')
    navigate.add_argument('--beta', dest='entropy_coef', type=float, help='entropy bonus coefficient')
    navigate.add_argument('--episodes', type=int, help='evaluation episodes')
    navigate.add_argument('--jitter', action='store_true', default=None, help='jitter actions within grid cells')

    sample = commands.add_parser('sample', help='draw samples from a checkpoint')
    _common(sample)
    sample.add_argument('--checkpoint', help='natural-parameter checkpoint (lambda.json)')
    sample.add_argument('-n', '--count', type=int, help='number of samples')
    sample.add_argument('--jitter', action='store_true', default=None, help='jitter samples within grid cells')

    density = commands.add_parser('density', help='export the density of a checkpoint')
    _common(density)
    density.add_argument('--checkpoint', help='natural-parameter checkpoint (lambda.json)')

    commands.add_parser('version', help='print package versions')
    return parser


def main(argv=None):
    """Run the command line interface and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return error.code if isinstance(error.code, int) else 2

    if args.verbose:
        set_log_level(logging.DEBUG)
    elif args.quiet:
        set_log_level(logging.WARNING)

    flags = {key: value for key, value in vars(args).items() if key not in ('command', 'config', 'verbose', 'quiet')}
    try:
        config = RunConfig.resolve(args.command, getattr(args, 'config', None), flags)
        if args.command != 'version':
            config.write(config['out'])
        return _HANDLERS[args.command](config)
    except NumericalError as error:
        LOG.error('Numerical failure: %s', error)
        return 1
    except (MePolyError, OSError, ValueError) as error:
        LOG.error('%s', error)
        return 2


if __name__ == '__main__':
    sys.exit(main())
