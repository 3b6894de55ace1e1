from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    'DEFAULT_SIGMA',
    'ManifoldReward',
    'manifold_reward',
]

#: Kernel width of the manifold reward.
DEFAULT_SIGMA = 0.05


class ManifoldReward(object):
    """Gaussian kernel of the distance to the nearest point of a point set.

    ``r(a) = exp(-min_i |a - x_i|^2 / (2 sigma^2))``, always in ``(0, 1]``.
    The points are indexed once in a k-d tree, so the reward can be
    evaluated for large action batches.

    Parameters
    ----------
    target_points : :class:`numpy.ndarray`
        Non-empty array of shape ``(P, dim)``.
    sigma : :obj:`float`, optional
        Kernel width. Defaults to 0.05.

    Examples
    --------
    >>> reward = ManifoldReward([[0.0, 0.0]], sigma=0.05)
    >>> float(reward([0.0, 0.0]))
    1.0
    """

    def __init__(self, target_points, sigma=DEFAULT_SIGMA):
        points = np.asarray(target_points, dtype=float)
        if points.ndim != 2 or points.shape[0] == 0:
            raise ValueError('The target point set must be a non-empty (P, dim) array.')
        if sigma <= 0:
            raise ValueError('sigma must be positive, got {!r}'.format(sigma))
        self.target_points = points
        self.sigma = float(sigma)
        self._tree = cKDTree(points)

    @property
    def dim(self):
        return self.target_points.shape[1]

    def distance(self, actions):
        """Distance of each action to its nearest target point."""
        distance, _ = self._tree.query(np.asarray(actions, dtype=float))
        return distance

    def __call__(self, actions):
        distance = self.distance(actions)
        return np.exp(-np.square(distance) / (2.0 * self.sigma ** 2))


def manifold_reward(action, target_points, sigma=DEFAULT_SIGMA):
    """Reward of one action (or a batch) against a target point set.

    Parameters
    ----------
    action : :class:`numpy.ndarray`
        One action ``(dim,)`` or a batch ``(N, dim)``.
    target_points : :class:`numpy.ndarray`
        Non-empty ``(P, dim)`` array.
    sigma : :obj:`float`, optional
        Kernel width. Defaults to 0.05.

    Returns
    -------
    :obj:`float` or :class:`numpy.ndarray`

    Examples
    --------
    >>> round(float(manifold_reward([0.1, 0.0], [[0.0, 0.0]], sigma=0.05)), 4)
    0.1353
    """
    return ManifoldReward(target_points, sigma)(action)
