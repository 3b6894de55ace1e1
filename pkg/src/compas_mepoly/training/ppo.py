from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
from compas.data import Data

from compas_mepoly.exceptions import NumericalError
from compas_mepoly.networks import HIDDEN_SIZES
from compas_mepoly.networks import Adam
from compas_mepoly.networks import backward
from compas_mepoly.networks import forward_with_cache
from compas_mepoly.polynomials import clip_lambda
from compas_mepoly.utilities import LOG

from .evaluation import evaluate
from .policy import PolyPolicy
from .rollouts import collect_rollouts
from .rollouts import compute_gae

__all__ = [
    'METRIC_HEADER',
    'PpoConfig',
    'PpoTrainer',
    'clipped_surrogate',
    'ppo_update',
]

METRIC_HEADER = ['update', 'steps', 'episodes', 'mean_return', 'success_rate', 'entropy',
                 'policy_loss', 'value_loss', 'approx_kl', 'clip_fraction', 'aborted']

_DEFAULTS = {
    'clip_epsilon': 0.2,
    'entropy_coef': 0.1,
    'gamma': 0.99,
    'gae_lambda': 0.95,
    'policy_lr': 3e-4,
    'value_lr': 1e-3,
    'epochs': 4,
    'minibatch_size': 256,
    'total_steps': 200000,
    'rollout_steps': 256,
    'envs': 8,
    'hidden_sizes': list(HIDDEN_SIZES),
    'weight_decay': 0.0,
    'normalize_advantages': True,
    'jitter': False,
}


class PpoConfig(Data):
    """Hyperparameters of :func:`ppo_update` and :class:`PpoTrainer`.

    Parameters
    ----------
    clip_epsilon : :obj:`float`
        Ratio clipping ``epsilon`` in ``(0, 1)``. Defaults to 0.2.
    entropy_coef : :obj:`float`
        Entropy bonus ``beta >= 0``. Defaults to 0.1.
    gamma : :obj:`float`
        Discount in ``[0, 1)``. Defaults to 0.99.
    gae_lambda : :obj:`float`
        Defaults to 0.95.
    policy_lr, value_lr : :obj:`float`
        Adam learning rates. Default to ``3e-4`` and ``1e-3``.
    epochs : :obj:`int`
        Passes over each batch. Defaults to 4.
    minibatch_size : :obj:`int`
        Defaults to 256.
    total_steps : :obj:`int`
        Environment steps of a training run. Defaults to 200000.
    rollout_steps : :obj:`int`
        Steps per environment copy and update. Defaults to 256.
    envs : :obj:`int`
        Environment copies. Defaults to 8.
    hidden_sizes : :obj:`list` of :obj:`int`
        Hidden layers of both networks. Defaults to ``[256, 256]``.
    weight_decay : :obj:`float`
        Decoupled Adam weight decay. Defaults to 0.
    normalize_advantages : :obj:`bool`
        Standardize advantages per batch. Defaults to ``True``.
    jitter : :obj:`bool`
        Jitter applied velocities within the grid cell. Defaults to ``False``.
    """

    def __init__(self, name=None, **kwargs):
        super(PpoConfig, self).__init__(name=name)
        unknown = sorted(set(kwargs) - set(_DEFAULTS))
        if unknown:
            raise ValueError('Unknown PPO setting {!r}'.format(unknown[0]))
        values = dict(_DEFAULTS)
        values.update(kwargs)
        self._apply(values)

    def _apply(self, values):
        if not 0.0 < values['clip_epsilon'] < 1.0:
            raise ValueError('clip_epsilon must lie in (0, 1), got {!r}'.format(values['clip_epsilon']))
        if not 0.0 <= values['gamma'] < 1.0:
            raise ValueError('gamma must lie in [0, 1), got {!r}'.format(values['gamma']))
        if not 0.0 <= values['gae_lambda'] <= 1.0:
            raise ValueError('gae_lambda must lie in [0, 1], got {!r}'.format(values['gae_lambda']))
        if values['entropy_coef'] < 0:
            raise ValueError('entropy_coef must be non-negative, got {!r}'.format(values['entropy_coef']))
        for key in ('policy_lr', 'value_lr'):
            if values[key] <= 0:
                raise ValueError('{} must be positive, got {!r}'.format(key, values[key]))
        for key in ('epochs', 'minibatch_size', 'total_steps', 'rollout_steps', 'envs'):
            if int(values[key]) != values[key] or values[key] < 1:
                raise ValueError('{} must be a positive integer, got {!r}'.format(key, values[key]))

        self.clip_epsilon = float(values['clip_epsilon'])
        self.entropy_coef = float(values['entropy_coef'])
        self.gamma = float(values['gamma'])
        self.gae_lambda = float(values['gae_lambda'])
        self.policy_lr = float(values['policy_lr'])
        self.value_lr = float(values['value_lr'])
        self.epochs = int(values['epochs'])
        self.minibatch_size = int(values['minibatch_size'])
        self.total_steps = int(values['total_steps'])
        self.rollout_steps = int(values['rollout_steps'])
        self.envs = int(values['envs'])
        self.hidden_sizes = [int(size) for size in values['hidden_sizes']]
        self.weight_decay = float(values['weight_decay'])
        self.normalize_advantages = bool(values['normalize_advantages'])
        self.jitter = bool(values['jitter'])

    @property
    def data(self):
        return {key: getattr(self, key) for key in _DEFAULTS}

    @data.setter
    def data(self, data):
        values = dict(_DEFAULTS)
        values.update(data)
        self._apply(values)


def clipped_surrogate(ratio, advantages, clip_epsilon):
    """Clipped surrogate objective and its derivative with respect to the log-probability.

    ``L = min(r A, clip(r, 1 - eps, 1 + eps) A)``. Where the clipped branch
    is the minimum the derivative is zero.

    Returns
    -------
    :obj:`tuple`
        ``(objective, weight)`` per sample, with ``weight = dL / d log pi``.

    Examples
    --------
    >>> objective, weight = clipped_surrogate(np.array([1.0, 1.5]), np.array([2.0, 1.0]), 0.2)
    >>> objective.tolist(), weight.tolist()
    ([2.0, 1.2], [2.0, 0.0])
    """
    ratio = np.asarray(ratio, dtype=float)
    advantages = np.asarray(advantages, dtype=float)
    unclipped = ratio * advantages
    clipped = np.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon) * advantages
    objective = np.minimum(unclipped, clipped)
    weight = np.where(unclipped <= clipped, unclipped, 0.0)
    return objective, weight


def _policy_step(policy, optimizer, batch, config):
    states, indices, old_log_probs, advantages = batch
    distribution = policy.distribution
    raw, cache = forward_with_cache(policy.policy_params, states)
    lam = clip_lambda(raw, distribution.clip)

    log_density = distribution.grid_log_density(lam)
    rows = np.arange(states.shape[0])
    log_probs = log_density[rows, indices]
    ratio = np.exp(log_probs - old_log_probs)
    objective, weight = clipped_surrogate(ratio, advantages, config.clip_epsilon)

    masses = np.exp(log_density + distribution.grid.log_weights)
    entropy = -np.sum(masses * log_density, axis=-1)
    score = distribution.features[indices] - masses.dot(distribution.features)

    size = states.shape[0]
    gradient = weight[:, np.newaxis] * score
    if config.entropy_coef > 0:
        gradient = gradient + config.entropy_coef * distribution.entropy_gradient(lam)
    upstream = -gradient / size
    upstream[np.abs(raw) > distribution.clip] = 0.0

    loss = -(objective.mean() + config.entropy_coef * entropy.mean())
    grads = backward(policy.policy_params, cache, upstream)
    if not (np.isfinite(loss) and np.isfinite(grads.norm())):
        raise NumericalError('Non-finite policy loss {!r}.'.format(loss))
    policy.policy_params = optimizer.step(policy.policy_params, grads)

    stats = {
        'policy_loss': float(loss),
        'entropy': float(entropy.mean()),
        'approx_kl': float(np.mean(old_log_probs - log_probs)),
        'clip_fraction': float(np.mean(np.abs(ratio - 1.0) > config.clip_epsilon)),
    }
    return stats


def _value_step(policy, optimizer, states, returns):
    values, cache = forward_with_cache(policy.value_params, states)
    error = values[:, 0] - returns
    loss = 0.5 * np.mean(error ** 2)
    grads = backward(policy.value_params, cache, (error / states.shape[0])[:, np.newaxis])
    if not (np.isfinite(loss) and np.isfinite(grads.norm())):
        raise NumericalError('Non-finite value loss {!r}.'.format(loss))
    policy.value_params = optimizer.step(policy.value_params, grads)
    return float(loss)


def ppo_update(policy, buffer, config, policy_optimizer, value_optimizer, rng):
    """Run the PPO epochs over one batch of rollouts.

    The policy ascends the clipped surrogate plus ``entropy_coef`` times the
    exact grid entropy; the value head descends half the mean squared error
    to the returns. If any loss or gradient becomes non-finite, the update
    is abandoned and the networks and optimizer states are restored.

    Parameters
    ----------
    policy : :class:`compas_mepoly.training.PolyPolicy`
        Updated in place.
    buffer : :class:`compas_mepoly.training.RolloutBuffer`
        With advantages from :func:`compas_mepoly.training.compute_gae`.
    config : :class:`PpoConfig`
    policy_optimizer, value_optimizer : :class:`compas_mepoly.networks.Adam`
    rng : :class:`numpy.random.Generator`
        Shuffles the minibatches.

    Returns
    -------
    :obj:`dict`
        Per-minibatch traces ``policy_loss``, ``value_loss``, ``entropy``,
        ``approx_kl``, ``clip_fraction`` and the ``aborted`` flag.
    """
    if buffer.advantages is None:
        raise ValueError('Compute advantages before updating.')
    advantages = buffer.advantages
    if config.normalize_advantages:
        advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)

    saved = (policy.policy_params, policy.value_params, policy_optimizer.snapshot(), value_optimizer.snapshot())
    report = {'policy_loss': [], 'value_loss': [], 'entropy': [], 'approx_kl': [], 'clip_fraction': [], 'aborted': False}
    size = len(buffer)

    try:
        for _ in range(config.epochs):
            order = rng.permutation(size)
            for start in range(0, size, config.minibatch_size):
                batch = order[start:start + config.minibatch_size]
                states = buffer.states[batch]
                stats = _policy_step(policy, policy_optimizer,
                                     (states, buffer.indices[batch], buffer.log_probs[batch], advantages[batch]), config)
                stats['value_loss'] = _value_step(policy, value_optimizer, states, buffer.returns[batch])
                for key, value in stats.items():
                    report[key].append(value)
    except NumericalError as error:
        LOG.warning('PPO update aborted, parameters restored: %s', error)
        policy.policy_params, policy.value_params = saved[0], saved[1]
        policy_optimizer.restore(saved[2])
        value_optimizer.restore(saved[3])
        report['aborted'] = True
    return report


class PpoTrainer(object):
    """PPO training of a :class:`PolyPolicy` in a Smooth World layout.

    Parameters
    ----------
    world : :class:`compas_mepoly.environments.SmoothWorld`
    distribution : :class:`compas_mepoly.polynomials.PolyDistribution`
        Two-dimensional action distribution.
    config : :class:`PpoConfig`, optional
    seed : :obj:`int`, optional
    """

    def __init__(self, world, distribution, config=None, seed=0):
        if distribution.dim != 2:
            raise ValueError('Smooth World actions are 2D, the distribution is {}D.'.format(distribution.dim))
        self.world = world
        self.config = config or PpoConfig()
        self.policy = PolyPolicy.create(distribution, state_dim=2, hidden_sizes=self.config.hidden_sizes, seed=seed)
        self.policy_optimizer = Adam(self.policy.policy_params, lr=self.config.policy_lr, weight_decay=self.config.weight_decay)
        self.value_optimizer = Adam(self.policy.value_params, lr=self.config.value_lr, weight_decay=self.config.weight_decay)
        self.rng = np.random.default_rng(seed)
        self.steps = 0
        self.updates = 0

    def update(self):
        """Collect one batch, update, and return the metric row."""
        config = self.config
        buffer = collect_rollouts(self.world, self.policy, config.rollout_steps, self.rng, envs=config.envs, jitter=config.jitter)
        compute_gae(buffer, config.gamma, config.gae_lambda)
        report = ppo_update(self.policy, buffer, config, self.policy_optimizer, self.value_optimizer, self.rng)

        self.steps += len(buffer)
        self.updates += 1
        returns = buffer.episode_returns()
        causes = buffer.terminal_causes()

        def mean(values):
            return float(np.mean(values)) if len(values) else float('nan')

        row = [self.updates, self.steps, len(returns), mean(returns),
               mean([cause == 'goal' for cause in causes]),
               float(np.mean(self.policy.entropy(buffer.states))),
               mean(report['policy_loss']), mean(report['value_loss']),
               mean(report['approx_kl']), mean(report['clip_fraction']), report['aborted']]
        LOG.info('update %d: steps=%d return=%.3f success=%.2f entropy=%.3f', row[0], row[1], row[3], row[4], row[5])
        return row

    def train(self, total_steps=None):
        """Update until ``total_steps`` environment steps are used.

        Returns
        -------
        :obj:`list`
            One metric row per update, in :data:`METRIC_HEADER` order.
        """
        total_steps = total_steps or self.config.total_steps
        rows = []
        while self.steps < total_steps:
            rows.append(self.update())
        return rows

    def evaluate(self, episodes=100, rng=None, record=False):
        """See :func:`compas_mepoly.training.evaluate`."""
        rng = np.random.default_rng(rng)
        return evaluate(self.policy, self.world, episodes, rng, jitter=self.config.jitter, record=record)
