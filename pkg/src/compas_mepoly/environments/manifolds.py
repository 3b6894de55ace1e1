from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import math

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    'LEMNISCATE_SCALE',
    'MANIFOLD_KINDS',
    'MANIFOLD_POINTS',
    'MOON_OFFSET',
    'MOON_RADIUS',
    'make_manifold',
    'mode_mass',
]

MANIFOLD_KINDS = ('lemniscate', 'two_moons')
MANIFOLD_POINTS = 2000

LEMNISCATE_SCALE = 0.7
MOON_RADIUS = 0.5
MOON_OFFSET = (0.25, -0.15)


def _lemniscate(n, rng):
    t = rng.uniform(0.0, 2.0 * math.pi, size=n)
    points = LEMNISCATE_SCALE * np.stack([np.cos(t), np.sin(t) * np.cos(t)], axis=-1)
    labels = (points[:, 0] < 0).astype(int)
    return points, labels


def _two_moons(n, rng):
    first = (n + 1) // 2
    t = rng.uniform(0.0, math.pi, size=n)
    dx, dy = MOON_OFFSET
    upper = np.stack([dx + MOON_RADIUS * np.cos(t[:first]), dy + MOON_RADIUS * np.sin(t[:first])], axis=-1)
    lower = np.stack([-dx + MOON_RADIUS * np.cos(t[first:]), -dy - MOON_RADIUS * np.sin(t[first:])], axis=-1)
    labels = np.concatenate([np.zeros(first, dtype=int), np.ones(n - first, dtype=int)])
    return np.concatenate([upper, lower], axis=0), labels


def make_manifold(kind, n=MANIFOLD_POINTS, rng=None, return_labels=False):
    """Sample points on a one-dimensional target manifold in ``[-1, 1]^2``.

    ``'lemniscate'``
        ``0.7 (cos t, sin t cos t)`` with ``t`` uniform on ``[0, 2 pi)``;
        labels are the lobes (0 for ``x >= 0``).
    ``'two_moons'``
        Two half-circles of radius 0.5; the upper one centered at
        ``(0.25, -0.15)``, the lower one at ``(-0.25, 0.15)``. The first
        ``ceil(n / 2)`` points lie on the upper moon (label 0).

    Parameters
    ----------
    kind : {'lemniscate', 'two_moons'}
    n : :obj:`int`, optional
        Number of points, at least 1. Defaults to 2000.
    rng : :class:`numpy.random.Generator` or :obj:`int`, optional
    return_labels : :obj:`bool`, optional
        Also return the lobe or moon index of every point.

    Returns
    -------
    :class:`numpy.ndarray` or :obj:`tuple`
        Points of shape ``(n, 2)``, and labels of shape ``(n,)`` if requested.

    Examples
    --------
    >>> points = make_manifold('two_moons', 5, rng=0)
    >>> points.shape
    (5, 2)
    """
    if n < 1:
        raise ValueError('n must be >= 1, got {!r}'.format(n))
    rng = np.random.default_rng(rng)
    if kind == 'lemniscate':
        points, labels = _lemniscate(int(n), rng)
    elif kind == 'two_moons':
        points, labels = _two_moons(int(n), rng)
    else:
        raise ValueError('Unknown manifold {!r}, expected one of {}'.format(kind, MANIFOLD_KINDS))
    if return_labels:
        return points, labels
    return points


def mode_mass(masses, grid_points, manifold_points, labels, radius):
    """Probability mass within ``radius`` of each labeled part of a manifold.

    Parameters
    ----------
    masses : :class:`numpy.ndarray`
        Grid masses summing to one.
    grid_points : :class:`numpy.ndarray`
        ``(N, dim)`` points the masses belong to.
    manifold_points : :class:`numpy.ndarray`
        ``(P, dim)`` manifold samples.
    labels : :class:`numpy.ndarray`
        Integer label of every manifold sample.
    radius : :obj:`float`

    Returns
    -------
    :class:`numpy.ndarray`
        One mass per label ``0 .. max(labels)``.
    """
    masses = np.asarray(masses, dtype=float)
    labels = np.asarray(labels, dtype=int)
    result = np.zeros(labels.max() + 1)
    for label in range(result.shape[0]):
        part = manifold_points[labels == label]
        if part.shape[0] == 0:
            continue
        distance, _ = cKDTree(part).query(grid_points)
        result[label] = masses[distance <= radius].sum()
    return result
