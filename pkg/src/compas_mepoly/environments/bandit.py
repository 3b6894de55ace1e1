from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
from compas.data import Data

from compas_mepoly.fitting import DEFAULT_SIGMA
from compas_mepoly.fitting import ManifoldReward
from compas_mepoly.fitting import boltzmann_target

from .manifolds import MANIFOLD_POINTS
from .manifolds import make_manifold

__all__ = [
    'BanditEnv',
    'bandit_step',
]


class BanditEnv(Data):
    """Single-state bandit rewarding actions close to a target manifold.

    Parameters
    ----------
    target_points : :class:`numpy.ndarray`
        ``(P, 2)`` points inside ``[-1, 1]^2``.
    sigma : :obj:`float`, optional
        Reward kernel width. Defaults to 0.05.
    alpha : :obj:`float`, optional
        Temperature of the maximum-entropy objective. Defaults to 0.05.
    labels : :class:`numpy.ndarray`, optional
        Mode label of every target point.
    """

    def __init__(self, target_points=None, sigma=DEFAULT_SIGMA, alpha=0.05, labels=None, name=None):
        super(BanditEnv, self).__init__(name=name)
        self._configure(target_points if target_points is not None else [[0.0, 0.0]], sigma, alpha, labels)

    def _configure(self, target_points, sigma, alpha, labels):
        points = np.asarray(target_points, dtype=float)
        if points.ndim != 2 or np.any(np.abs(points) > 1.0):
            raise ValueError('Target points must be a (P, dim) array inside [-1, 1]^dim.')
        if alpha <= 0:
            raise ValueError('alpha must be positive, got {!r}'.format(alpha))
        self.reward = ManifoldReward(points, sigma)
        self.alpha = float(alpha)
        self.labels = np.zeros(points.shape[0], dtype=int) if labels is None else np.asarray(labels, dtype=int)

    @classmethod
    def from_manifold(cls, kind, n=MANIFOLD_POINTS, seed=0, sigma=DEFAULT_SIGMA, alpha=0.05):
        """Bandit over a manifold from :func:`compas_mepoly.environments.make_manifold`."""
        points, labels = make_manifold(kind, n, rng=seed, return_labels=True)
        return cls(points, sigma, alpha, labels, name=kind)

    @property
    def target_points(self):
        return self.reward.target_points

    @property
    def sigma(self):
        return self.reward.sigma

    def step(self, actions):
        """Rewards of one action or a batch; actions are clamped to the box."""
        return self.reward(np.clip(np.asarray(actions, dtype=float), -1.0, 1.0))

    def optimal_policy(self, grid):
        """The Boltzmann target ``exp(r / alpha)`` on a grid."""
        return boltzmann_target(self.reward, grid, self.alpha)

    @property
    def data(self):
        return {
            'target_points': self.target_points.tolist(),
            'sigma': self.sigma,
            'alpha': self.alpha,
            'labels': self.labels.tolist(),
        }

    @data.setter
    def data(self, data):
        self._configure(data['target_points'], data['sigma'], data['alpha'], data.get('labels'))


def bandit_step(env, action):
    """Play one action: the manifold reward of the (clamped) action.

    Examples
    --------
    >>> env = BanditEnv([[0.0, 0.0]], sigma=0.05)
    >>> round(float(bandit_step(env, [0.05, 0.0])), 6)
    0.606531
    """
    return env.step(action)
