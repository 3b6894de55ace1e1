from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import math

import numpy as np
from compas.data import Data

from compas_mepoly.exceptions import DimensionMismatchError
from compas_mepoly.utilities import map_chunks

from .basis import features

__all__ = [
    'DEFAULT_GRID_SIZE',
    'FULL_GRID_MAX_DIM',
    'STOCHASTIC_GRID_SIZE',
    'Grid1D',
    'ProductGrid',
    'GridFeatureTable',
    'build_grid',
    'precompute_features',
    'product_grid',
    'stochastic_grid',
    'trapezoid_grid',
]

DEFAULT_GRID_SIZE = 64
FULL_GRID_MAX_DIM = 3
STOCHASTIC_GRID_SIZE = 4096


class Grid1D(Data):
    """Uniform trapezoidal quadrature rule on ``[-1, 1]``.

    Attributes
    ----------
    nodes : :class:`numpy.ndarray`
        Strictly increasing nodes from -1 to 1.
    log_weights : :class:`numpy.ndarray`
        Logarithm of the trapezoid weights; the weights sum to 2.
    """

    def __init__(self, nodes=None, log_weights=None, name=None):
        super(Grid1D, self).__init__(name=name)
        self.nodes = np.asarray(nodes if nodes is not None else [-1.0, 1.0], dtype=float)
        self.log_weights = np.asarray(log_weights if log_weights is not None else [0.0, 0.0], dtype=float)

    @property
    def size(self):
        return self.nodes.shape[0]

    @property
    def spacing(self):
        """:obj:`float` : Distance between neighbouring nodes."""
        return 2.0 / (self.size - 1)

    @property
    def data(self):
        return {'nodes': self.nodes.tolist(), 'log_weights': self.log_weights.tolist()}

    @data.setter
    def data(self, data):
        self.nodes = np.asarray(data['nodes'], dtype=float)
        self.log_weights = np.asarray(data['log_weights'], dtype=float)


def trapezoid_grid(grid_size=DEFAULT_GRID_SIZE):
    """Build the composite trapezoid rule with ``grid_size`` uniform nodes on ``[-1, 1]``.

    Endpoint weights are half the interior weight ``2 / (grid_size - 1)``.

    Parameters
    ----------
    grid_size : :obj:`int`, optional
        Number of nodes, at least 2. Defaults to 64.

    Returns
    -------
    :class:`Grid1D`

    Examples
    --------
    >>> g = trapezoid_grid(3)
    >>> np.exp(g.log_weights).round(12).tolist()
    [0.5, 1.0, 0.5]
    """
    if int(grid_size) != grid_size or grid_size < 2:
        raise ValueError('grid_size must be an integer >= 2, got {!r}'.format(grid_size))
    grid_size = int(grid_size)
    nodes = np.linspace(-1.0, 1.0, grid_size)
    weights = np.ones(grid_size)
    weights[0] = weights[-1] = 0.5
    weights = weights * (2.0 / (grid_size - 1))
    return Grid1D(nodes, np.log(weights))


class ProductGrid(Data):
    """Quadrature points in ``[-1, 1]^dim`` with per-point log-weights.

    Parameters
    ----------
    dim : :obj:`int`
        Dimension of the points.
    points : :class:`numpy.ndarray`
        Array of shape ``(N, dim)``.
    log_weights : :class:`numpy.ndarray`
        Array of shape ``(N,)``.
    kind : {'full', 'stochastic'}
        ``'full'`` for the tensor product of a 1D rule, ``'stochastic'`` for
        a sub-sampled lattice or Monte Carlo points.
    spacing : :obj:`float`
        Node spacing of the underlying 1D rule, used for within-cell jitter.
    """

    KINDS = ('full', 'stochastic')

    def __init__(self, dim=1, points=None, log_weights=None, kind='full', spacing=2.0, name=None):
        super(ProductGrid, self).__init__(name=name)
        self.dim = int(dim)
        self.points = np.asarray(points if points is not None else np.zeros((0, self.dim)), dtype=float).reshape(-1, self.dim)
        self.log_weights = np.asarray(log_weights if log_weights is not None else np.zeros(0), dtype=float)
        if kind not in self.KINDS:
            raise ValueError('Unknown grid kind {!r}'.format(kind))
        self.kind = kind
        self.spacing = float(spacing)
        if self.points.shape[0] != self.log_weights.shape[0]:
            raise DimensionMismatchError('log_weights', self.points.shape[0], self.log_weights.shape[0])

    @property
    def size(self):
        """:obj:`int` : Number of quadrature points."""
        return self.points.shape[0]

    @property
    def weights(self):
        return np.exp(self.log_weights)

    def __repr__(self):
        return 'ProductGrid(dim={}, size={}, kind={!r})'.format(self.dim, self.size, self.kind)

    @property
    def data(self):
        return {
            'dim': self.dim,
            'points': self.points.tolist(),
            'log_weights': self.log_weights.tolist(),
            'kind': self.kind,
            'spacing': self.spacing,
        }

    @data.setter
    def data(self, data):
        self.dim = int(data['dim'])
        self.points = np.asarray(data['points'], dtype=float).reshape(-1, self.dim)
        self.log_weights = np.asarray(data['log_weights'], dtype=float)
        self.kind = data.get('kind', 'full')
        self.spacing = float(data.get('spacing', 2.0))


def product_grid(grid, dim, max_dim=FULL_GRID_MAX_DIM):
    """Tensor product of a 1D rule with itself, ``dim`` times.

    The log-weight of a point is the sum of its per-dimension log-weights.
    Points are ordered with the last coordinate varying fastest.

    Parameters
    ----------
    grid : :class:`Grid1D`
        The 1D rule.
    dim : :obj:`int`
        Number of dimensions, ``1 <= dim <= max_dim``.
    max_dim : :obj:`int`, optional
        Largest dimension for which a full grid is built. Defaults to 3.

    Returns
    -------
    :class:`ProductGrid`

    Raises
    ------
    ValueError
        If ``dim`` is above ``max_dim``; use :func:`stochastic_grid` instead.
    """
    if dim < 1:
        raise ValueError('dim must be >= 1, got {!r}'.format(dim))
    if dim > max_dim:
        raise ValueError('Full grids are limited to {} dimensions, got {}; use stochastic_grid'.format(max_dim, dim))

    meshes = np.meshgrid(*[grid.nodes] * dim, indexing='ij')
    points = np.stack(meshes, axis=-1).reshape(-1, dim)
    weight_meshes = np.meshgrid(*[grid.log_weights] * dim, indexing='ij')
    log_weights = np.sum(np.stack(weight_meshes, axis=-1), axis=-1).reshape(-1)
    return ProductGrid(dim, points, log_weights, kind='full', spacing=grid.spacing)


def stochastic_grid(grid, dim, sample_size=STOCHASTIC_GRID_SIZE, rng=None, continuous=False):
    """Randomly sub-sampled quadrature for higher dimensions.

    Points are drawn uniformly, with replacement, from the node lattice of
    ``grid``. The log-weights are the lattice weights plus the correction
    ``dim * ln(n) - ln(sample_size)``, so the weight sum is an unbiased
    estimator of the box volume ``2^dim``.

    With ``continuous=True`` the points are uniform in the box instead and
    every point carries the Monte Carlo log-weight ``dim * ln(2) - ln(sample_size)``.

    Parameters
    ----------
    grid : :class:`Grid1D`
        The 1D rule providing the lattice.
    dim : :obj:`int`
        Number of dimensions.
    sample_size : :obj:`int`, optional
        Number of points. Defaults to 4096.
    rng : :class:`numpy.random.Generator` or :obj:`int`, optional
        Random generator or seed.
    continuous : :obj:`bool`, optional
        Sample continuous uniform points instead of lattice nodes.

    Returns
    -------
    :class:`ProductGrid`
    """
    if sample_size < 1:
        raise ValueError('sample_size must be >= 1, got {!r}'.format(sample_size))
    rng = np.random.default_rng(rng)
    if continuous:
        points = rng.uniform(-1.0, 1.0, size=(sample_size, dim))
        log_weights = np.full(sample_size, dim * math.log(2.0) - math.log(sample_size))
        return ProductGrid(dim, points, log_weights, kind='stochastic', spacing=grid.spacing)

    idx = rng.integers(0, grid.size, size=(sample_size, dim))
    points = grid.nodes[idx]
    log_weights = grid.log_weights[idx].sum(axis=-1)
    log_correction = dim * math.log(grid.size) - math.log(sample_size)
    return ProductGrid(dim, points, log_weights + log_correction, kind='stochastic', spacing=grid.spacing)


def build_grid(dim, grid_size=DEFAULT_GRID_SIZE, full_grid_max_dim=FULL_GRID_MAX_DIM,
               stochastic_grid_size=STOCHASTIC_GRID_SIZE, rng=None):
    """Full grid up to ``full_grid_max_dim`` dimensions, stochastic grid above."""
    grid = trapezoid_grid(grid_size)
    if dim <= full_grid_max_dim:
        return product_grid(grid, dim, max_dim=full_grid_max_dim)
    return stochastic_grid(grid, dim, stochastic_grid_size, rng=rng)


class GridFeatureTable(object):
    """Basis features evaluated once at every point of a grid.

    Attributes
    ----------
    features : :class:`numpy.ndarray`
        Array of shape ``(N, M)``; row ``i`` is ``features(grid.points[i], basis, kind)``.
    basis : :class:`compas_mepoly.polynomials.ExponentSet`
    kind : :obj:`str`
    """

    def __init__(self, values, basis, kind='legendre'):
        self.features = np.asarray(values, dtype=float)
        self.features.setflags(write=False)
        self.basis = basis
        self.kind = kind

    @property
    def shape(self):
        return self.features.shape

    def gram(self, log_weights):
        """Weighted Gram matrix ``F^T diag(w) F`` of the feature columns."""
        weighted = self.features * np.exp(log_weights)[:, np.newaxis]
        return self.features.T.dot(weighted)


def precompute_features(grid, basis, kind='legendre', workers=None):
    """Evaluate the basis features at every grid point.

    Rows are computed in chunks on a thread pool (see
    :func:`compas_mepoly.utilities.worker_count`); the table is identical for
    any number of workers.

    Parameters
    ----------
    grid : :class:`ProductGrid`
    basis : :class:`compas_mepoly.polynomials.ExponentSet`
    kind : {'legendre', 'monomial'}, optional

    Returns
    -------
    :class:`GridFeatureTable`
    """
    if basis.dim != grid.dim:
        raise DimensionMismatchError('basis dimension', grid.dim, basis.dim)

    def evaluate(start, stop):
        return features(grid.points[start:stop], basis, kind)

    chunks = map_chunks(evaluate, grid.size, workers=workers)
    values = np.concatenate(chunks, axis=0) if chunks else np.zeros((0, basis.feature_count))
    return GridFeatureTable(values, basis, kind)
