from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
from compas.data import Data

from compas_mepoly.exceptions import NumericalError
from compas_mepoly.networks import AdamState
from compas_mepoly.networks import adam_step
from compas_mepoly.networks import natural_gradient_step
from compas_mepoly.polynomials import NaturalParams
from compas_mepoly.polynomials import clip_params
from compas_mepoly.utilities import LOG

__all__ = [
    'BASELINES',
    'KL_TRACE_HEADER',
    'OPTIMIZERS',
    'BanditConfig',
    'BanditTrainer',
    'bandit_gradient',
    'bandit_maxent_update',
    'score_function_gradient',
]

BASELINES = ('leave_one_out', 'batch_mean', 'none')

OPTIMIZERS = ('natural', 'adam', 'sgd')

KL_TRACE_HEADER = ['step', 'kl', 'entropy', 'mean_reward']


class BanditConfig(Data):
    """Settings of the single-state maximum-entropy trainer.

    Parameters
    ----------
    alpha : :obj:`float`, optional
        Entropy temperature. Defaults to 0.05.
    lr : :obj:`float`, optional
        Learning rate. Defaults to 0.2.
    batch_size : :obj:`int`, optional
        Actions sampled per update. Defaults to 1024.
    steps : :obj:`int`, optional
        Number of updates. Defaults to 2000.
    baseline : {'leave_one_out', 'batch_mean', 'none'}, optional
    optimizer : {'natural', 'adam', 'sgd'}, optional
        ``'natural'`` preconditions with the exact grid Fisher information.
        Defaults to ``'natural'``.
    damping : :obj:`float`, optional
        Relative damping of the natural step. Defaults to 1e-4.
    max_kl : :obj:`float`, optional
        Trust region of the natural step in nats, 0 to disable. Defaults to 0.01.

    Notes
    -----
    With ``alpha > 0`` the natural step contracts the parameters by
    ``1 - lr * alpha`` per update, so ``lr * alpha`` should stay well below one.
    """

    def __init__(self, alpha=0.05, lr=0.2, batch_size=1024, steps=2000, baseline='leave_one_out', optimizer='natural',
                 damping=1e-4, max_kl=0.01, name=None):
        super(BanditConfig, self).__init__(name=name)
        self._apply(alpha, lr, batch_size, steps, baseline, optimizer, damping, max_kl)

    def _apply(self, alpha, lr, batch_size, steps, baseline, optimizer, damping, max_kl):
        if alpha < 0:
            raise ValueError('alpha must be non-negative, got {!r}'.format(alpha))
        if lr <= 0:
            raise ValueError('lr must be positive, got {!r}'.format(lr))
        if batch_size < 2:
            raise ValueError('batch_size must be at least 2, got {!r}'.format(batch_size))
        if steps < 0:
            raise ValueError('steps must be non-negative, got {!r}'.format(steps))
        if baseline not in BASELINES:
            raise ValueError('Unknown baseline {!r}, expected one of {}'.format(baseline, BASELINES))
        if optimizer not in OPTIMIZERS:
            raise ValueError('Unknown optimizer {!r}, expected one of {}'.format(optimizer, OPTIMIZERS))
        if damping <= 0:
            raise ValueError('damping must be positive, got {!r}'.format(damping))
        if max_kl < 0:
            raise ValueError('max_kl must be non-negative, got {!r}'.format(max_kl))
        self.alpha = float(alpha)
        self.lr = float(lr)
        self.batch_size = int(batch_size)
        self.steps = int(steps)
        self.baseline = baseline
        self.optimizer = optimizer
        self.damping = float(damping)
        self.max_kl = float(max_kl)

    @property
    def data(self):
        return {
            'alpha': self.alpha,
            'lr': self.lr,
            'batch_size': self.batch_size,
            'steps': self.steps,
            'baseline': self.baseline,
            'optimizer': self.optimizer,
            'damping': self.damping,
            'max_kl': self.max_kl,
        }

    @data.setter
    def data(self, data):
        defaults = BanditConfig().data
        defaults.update(data)
        self._apply(**defaults)


def score_function_gradient(rewards, scores, baseline='leave_one_out'):
    """Score-function estimate of ``grad E[r]`` from one or many batches.

    Parameters
    ----------
    rewards : :class:`numpy.ndarray`
        ``(..., B)`` rewards.
    scores : :class:`numpy.ndarray`
        ``(..., B, M)`` score vectors ``grad log pi(a)``.
    baseline : {'leave_one_out', 'batch_mean', 'none'}, optional
        ``leave_one_out`` subtracts the mean reward of the other samples,
        which keeps the estimate unbiased.

    Returns
    -------
    :class:`numpy.ndarray`
        ``(..., M)``.

    Examples
    --------
    >>> score_function_gradient(np.ones(4), np.eye(4)).tolist()
    [0.0, 0.0, 0.0, 0.0]
    """
    rewards = np.asarray(rewards, dtype=float)
    size = rewards.shape[-1]
    if baseline == 'none':
        centered = rewards
    else:
        centered = rewards - rewards.mean(axis=-1, keepdims=True)
        if baseline == 'leave_one_out':
            centered = centered * size / (size - 1.0)
    return np.einsum('...b,...bm->...m', centered, scores) / size


def bandit_gradient(params, actions, rewards, alpha, distribution, baseline='leave_one_out'):
    """Ascent direction of ``E[r] + alpha H`` at ``params``.

    The reward term is estimated from the batch; the entropy term is the
    exact grid gradient.
    """
    scores = distribution.log_prob_gradient(params, actions)
    gradient = score_function_gradient(rewards, scores, baseline)
    if alpha:
        gradient = gradient + alpha * distribution.entropy_gradient(params)
    return gradient


def bandit_maxent_update(params, actions, rewards, alpha, distribution, lr=0.05, optimizer_state=None,
                         baseline='leave_one_out', natural=False, damping=1e-4, max_kl=0.01):
    """One ascent step of the single-state maximum-entropy objective.

    Parameters
    ----------
    params : :class:`compas_mepoly.polynomials.NaturalParams`
    actions : :class:`numpy.ndarray`
        ``(B, dim)`` actions sampled from ``params``.
    rewards : :class:`numpy.ndarray`
        ``(B,)`` their rewards.
    alpha : :obj:`float`
        Entropy temperature, ``0`` for the greedy objective.
    distribution : :class:`compas_mepoly.polynomials.PolyDistribution`
    lr : :obj:`float`, optional
    optimizer_state : :class:`compas_mepoly.networks.AdamState`, optional
        Take an Adam step (updated in place) instead of a plain gradient step.
    baseline : :obj:`str`, optional
    natural : :obj:`bool`, optional
        Precondition with the exact grid Fisher information, see
        :func:`compas_mepoly.networks.natural_gradient_step`.
    damping, max_kl : :obj:`float`, optional
        Settings of the natural step.

    Returns
    -------
    :class:`compas_mepoly.polynomials.NaturalParams`
        The updated, clipped parameters.
    """
    lam = params.values if isinstance(params, NaturalParams) else np.asarray(params, dtype=float)
    gradient = bandit_gradient(lam, actions, rewards, alpha, distribution, baseline)
    if not np.all(np.isfinite(gradient)):
        raise NumericalError('Non-finite bandit gradient.')
    # the constant feature only shifts the log-partition
    gradient[0] = 0.0
    if natural:
        updated = natural_gradient_step(lam, gradient, distribution.fisher_information(lam), lr, damping, max_kl)
        updated[0] = lam[0]
    elif optimizer_state is None:
        updated = lam + lr * gradient
    else:
        updated = adam_step(lam, -gradient, optimizer_state, lr=lr)
    return clip_params(updated, distribution.clip, distribution.feature_count)


class BanditTrainer(object):
    """Trains natural parameters directly on a :class:`compas_mepoly.environments.BanditEnv`.

    Parameters
    ----------
    env : :class:`compas_mepoly.environments.BanditEnv`
    distribution : :class:`compas_mepoly.polynomials.PolyDistribution`
    config : :class:`BanditConfig`, optional
        ``alpha`` defaults to the environment's temperature.
    seed : :obj:`int`, optional
    """

    def __init__(self, env, distribution, config=None, seed=0):
        self.env = env
        self.distribution = distribution
        self.config = config or BanditConfig(alpha=env.alpha)
        self.params = NaturalParams.zeros(distribution.feature_count, distribution.clip)
        self.optimizer_state = AdamState(distribution.feature_count) if self.config.optimizer == 'adam' else None
        self.rng = np.random.default_rng(seed)
        self.target = env.optimal_policy(distribution.grid)
        self.steps = 0

    def kl_to_target(self):
        """Grid ``KL(policy || target)``."""
        masses = self.distribution.masses(self.params)
        support = masses > 0
        return float(np.sum(masses[support] * (np.log(masses[support]) - np.log(np.maximum(self.target.masses[support], 1e-300)))))

    def step(self):
        """One sampled update; returns its row in :data:`KL_TRACE_HEADER` order."""
        config = self.config
        actions, _ = self.distribution.sample(self.params, self.rng, size=config.batch_size)
        rewards = self.env.step(actions)
        self.params = bandit_maxent_update(self.params, actions, rewards, config.alpha, self.distribution,
                                           config.lr, self.optimizer_state, config.baseline,
                                           natural=config.optimizer == 'natural', damping=config.damping,
                                           max_kl=config.max_kl)
        self.steps += 1
        row = [self.steps, self.kl_to_target(), float(self.distribution.entropy(self.params)), float(np.mean(rewards))]
        LOG.debug('bandit step %d: kl=%.4f entropy=%.4f reward=%.4f', *row)
        return row

    def train(self, steps=None):
        """Run ``steps`` updates (the configured number by default) and return the trace rows."""
        steps = self.config.steps if steps is None else steps
        rows = [self.step() for _ in range(steps)]
        if rows:
            LOG.info('bandit training finished after %d steps: kl=%.4f entropy=%.4f', rows[-1][0], rows[-1][1], rows[-1][2])
        return rows
