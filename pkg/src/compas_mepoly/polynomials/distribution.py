from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
from compas.data import Data
from scipy.special import logsumexp

from compas_mepoly.exceptions import DimensionMismatchError
from compas_mepoly.exceptions import NumericalError
from compas_mepoly.utilities import LOG

from .basis import ExponentSet
from .basis import features
from .quadrature import DEFAULT_GRID_SIZE
from .quadrature import FULL_GRID_MAX_DIM
from .quadrature import STOCHASTIC_GRID_SIZE
from .quadrature import build_grid
from .quadrature import precompute_features

__all__ = [
    'LAMBDA_CLIP',
    'NaturalParams',
    'PolyDistribution',
    'clip_lambda',
    'clip_params',
    'l1_distance',
]

#: Default elementwise bound on the natural parameters.
LAMBDA_CLIP = 5.0


def clip_lambda(raw, clip=LAMBDA_CLIP):
    """Clamp raw natural parameters elementwise to ``[-clip, clip]``.

    Works on a single vector or on a batch of vectors.

    Raises
    ------
    :class:`compas_mepoly.exceptions.NumericalError`
        If any entry is NaN or infinite.
    """
    raw = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(raw)):
        raise NumericalError('Natural parameters contain non-finite entries.')
    return np.clip(raw, -clip, clip)


class NaturalParams(Data):
    """Clipped natural parameters ``lambda`` of one polynomial distribution.

    Parameters
    ----------
    values : sequence of :obj:`float`
        Raw parameters; they are clamped to ``[-clip, clip]``.
    clip : :obj:`float`, optional
        Positive bound. Defaults to 5.0.

    Attributes
    ----------
    values : :class:`numpy.ndarray`
        The clipped vector of length ``M``.
    clip : :obj:`float`
    """

    def __init__(self, values=None, clip=LAMBDA_CLIP, name=None):
        super(NaturalParams, self).__init__(name=name)
        if clip <= 0:
            raise ValueError('clip must be positive, got {!r}'.format(clip))
        self.clip = float(clip)
        self.values = clip_lambda(values if values is not None else [0.0], self.clip).reshape(-1)
        self.values.setflags(write=False)

    @property
    def feature_count(self):
        return self.values.shape[0]

    def __len__(self):
        return self.feature_count

    def __repr__(self):
        return 'NaturalParams({}, clip={!r})'.format(np.array2string(self.values, precision=4), self.clip)

    @classmethod
    def zeros(cls, feature_count, clip=LAMBDA_CLIP):
        """The uniform distribution: all natural parameters zero."""
        return cls(np.zeros(feature_count), clip)

    @property
    def data(self):
        return {'values': self.values.tolist(), 'clip': self.clip}

    @data.setter
    def data(self, data):
        self.clip = float(data.get('clip', LAMBDA_CLIP))
        self.values = clip_lambda(data['values'], self.clip).reshape(-1)
        self.values.setflags(write=False)


def clip_params(raw, clip=LAMBDA_CLIP, feature_count=None):
    """Build :class:`NaturalParams` from a raw vector.

    Parameters
    ----------
    raw : sequence of :obj:`float`
        Raw parameter vector.
    clip : :obj:`float`, optional
        Elementwise bound. Defaults to 5.0.
    feature_count : :obj:`int`, optional
        Expected length ``M``.

    Returns
    -------
    :class:`NaturalParams`

    Examples
    --------
    >>> clip_params([7.0, -9.0, 0.0]).values.tolist()
    [5.0, -5.0, 0.0]
    """
    raw = np.asarray(raw, dtype=float).reshape(-1)
    if feature_count is not None and raw.shape[0] != feature_count:
        raise DimensionMismatchError('natural parameters', feature_count, raw.shape[0])
    return NaturalParams(raw, clip)


def l1_distance(masses_a, masses_b):
    """L1 distance between two mass vectors on the same grid, in ``[0, 2]``.

    Parameters
    ----------
    masses_a, masses_b : :class:`numpy.ndarray`
        Grid masses, each summing to one.

    Returns
    -------
    :obj:`float`
    """
    masses_a = np.asarray(masses_a, dtype=float)
    masses_b = np.asarray(masses_b, dtype=float)
    if masses_a.shape != masses_b.shape:
        raise DimensionMismatchError('mass vector', masses_a.shape, masses_b.shape)
    return float(np.abs(masses_a - masses_b).sum())


class PolyDistribution(object):
    """Maximum-entropy polynomial distribution on ``[-1, 1]^dim``.

    The density is ``exp(<lambda, T(a)> - A(lambda))``. The log-partition
    ``A``, the entropy, expectations and the sampler are all evaluated on a
    fixed quadrature grid with precomputed features, so every operation is
    exact for the grid and differentiable in ``lambda``.

    All methods accept either one parameter vector of shape ``(M,)`` (or a
    :class:`NaturalParams`) or a batch of shape ``(B, M)`` with one vector
    per state; results then carry a leading batch axis.

    Parameters
    ----------
    basis : :class:`compas_mepoly.polynomials.ExponentSet`
        The polynomial basis.
    grid : :class:`compas_mepoly.polynomials.ProductGrid`
        Quadrature points and log-weights.
    table : :class:`compas_mepoly.polynomials.GridFeatureTable`, optional
        Precomputed grid features; computed when omitted.
    kind : {'legendre', 'monomial'}, optional
        Feature family. Defaults to ``'legendre'``.
    clip : :obj:`float`, optional
        Bound used by :meth:`params`. Defaults to 5.0.

    Examples
    --------
    >>> dist = PolyDistribution.from_settings(dim=2, order=2, grid_size=16)
    >>> uniform = NaturalParams.zeros(dist.feature_count)
    >>> round(dist.entropy(uniform), 6)
    1.386294
    """

    def __init__(self, basis, grid, table=None, kind='legendre', clip=LAMBDA_CLIP):
        if basis.dim != grid.dim:
            raise DimensionMismatchError('grid dimension', basis.dim, grid.dim)
        self.basis = basis
        self.grid = grid
        self.kind = kind
        self.clip = float(clip)
        self.table = table if table is not None else precompute_features(grid, basis, kind)
        if self.table.shape != (grid.size, basis.feature_count):
            raise DimensionMismatchError('feature table', (grid.size, basis.feature_count), self.table.shape)
        self.settings = None

    @classmethod
    def from_settings(cls, dim, order, grid_size=DEFAULT_GRID_SIZE, kind='legendre', clip=LAMBDA_CLIP,
                      full_grid_max_dim=FULL_GRID_MAX_DIM, stochastic_grid_size=STOCHASTIC_GRID_SIZE, seed=None):
        """Build basis, grid and feature table from scalar settings.

        A full tensor grid is used up to ``full_grid_max_dim`` dimensions,
        a stochastic grid of ``stochastic_grid_size`` points above.

        Returns
        -------
        :class:`PolyDistribution`
        """
        basis = ExponentSet(dim, order)
        grid = build_grid(dim, grid_size, full_grid_max_dim, stochastic_grid_size, rng=seed)
        distribution = cls(basis, grid, kind=kind, clip=clip)
        distribution.settings = {
            'dim': int(dim),
            'order': int(order),
            'grid_size': int(grid_size),
            'kind': kind,
            'clip': float(clip),
            'full_grid_max_dim': int(full_grid_max_dim),
            'stochastic_grid_size': int(stochastic_grid_size),
            'seed': seed,
        }
        return distribution

    @property
    def dim(self):
        return self.basis.dim

    @property
    def feature_count(self):
        return self.basis.feature_count

    @property
    def features(self):
        """:class:`numpy.ndarray` : Grid feature table of shape ``(N, M)``."""
        return self.table.features

    def __repr__(self):
        return 'PolyDistribution(dim={}, order={}, kind={!r}, grid={!r})'.format(self.dim, self.basis.order, self.kind, self.grid)

    # ------------------------------------------------------------------
    # parameters
    # ------------------------------------------------------------------

    def params(self, raw):
        """Clip a raw vector into :class:`NaturalParams` of this distribution."""
        return clip_params(raw, self.clip, self.feature_count)

    def _lambda(self, params):
        values = params.values if isinstance(params, NaturalParams) else np.asarray(params, dtype=float)
        if values.shape[-1] != self.feature_count or values.ndim > 2:
            raise DimensionMismatchError('natural parameters', self.feature_count, values.shape)
        if not np.all(np.isfinite(values)):
            raise NumericalError('Natural parameters contain non-finite entries.')
        return values

    def _actions(self, actions):
        actions = np.asarray(actions, dtype=float)
        if actions.shape[-1] != self.dim:
            raise DimensionMismatchError('action', self.dim, actions.shape[-1])
        if np.any(np.abs(actions) > 1.0):
            LOG.warning('Actions outside [-1, 1]^%d were clamped to the box.', self.dim)
            actions = np.clip(actions, -1.0, 1.0)
        return actions

    # ------------------------------------------------------------------
    # grid quantities
    # ------------------------------------------------------------------

    def logits(self, params):
        """Unnormalized log-density ``<lambda, T(x)>`` at every grid point."""
        return self._lambda(params).dot(self.features.T)

    def log_partition(self, params):
        """Log-partition ``A(lambda) = log sum_x exp(<lambda, T(x)> + log w(x))``.

        Returns
        -------
        :obj:`float` or :class:`numpy.ndarray`
        """
        return logsumexp(self.logits(params) + self.grid.log_weights, axis=-1)

    def grid_log_density(self, params):
        """Normalized log-density at every grid point."""
        logits = self.logits(params)
        log_z = logsumexp(logits + self.grid.log_weights, axis=-1)
        return logits - np.expand_dims(log_z, -1)

    def log_masses(self, params):
        """Log of the quadrature masses ``pi(x) w(x)``; they sum to one."""
        return self.grid_log_density(params) + self.grid.log_weights

    def masses(self, params):
        """Quadrature masses ``pi(x) w(x)`` of every grid point."""
        return np.exp(self.log_masses(params))

    def density_rows(self, params):
        """Grid points and their densities, for dumps.

        Returns
        -------
        :obj:`tuple`
            ``(points, density)`` with shapes ``(N, dim)`` and ``(N,)``.
        """
        return self.grid.points, np.exp(self.grid_log_density(params))

    def density_image(self, params):
        """Density of a full 1D or 2D grid as an image scaled to ``[0, 1]``.

        In 2D, row 0 is the largest second coordinate and column 0 the
        smallest first coordinate. A 1D density is a single-row strip. A
        constant density gives an all-white image.
        """
        if self.dim > 2 or self.grid.kind != 'full':
            raise ValueError('Density images need a full 1D or 2D grid.')
        density = np.exp(self.grid_log_density(params))
        if self.dim == 1:
            image = density.reshape(1, -1)
        else:
            n = int(round(np.sqrt(self.grid.size)))
            image = density.reshape(n, n).T[::-1]
        low, high = image.min(), image.max()
        if high - low <= 1e-12 * max(high, 1.0):
            return np.ones_like(image)
        return (image - low) / (high - low)

    # ------------------------------------------------------------------
    # density
    # ------------------------------------------------------------------

    def log_prob(self, params, actions):
        """Log-density ``<lambda, T(a)> - A(lambda)`` of actions.

        Parameters
        ----------
        params : :class:`NaturalParams` or :class:`numpy.ndarray`
            Shape ``(M,)`` or ``(B, M)``.
        actions : :class:`numpy.ndarray`
            One action ``(dim,)``, a batch ``(K, dim)`` for a single
            parameter vector, or ``(B, dim)`` paired with batched parameters.
            Actions outside the box are clamped with a warning.

        Returns
        -------
        :obj:`float` or :class:`numpy.ndarray`
        """
        lam = self._lambda(params)
        actions = self._actions(actions)
        feats = features(actions, self.basis, self.kind)
        log_z = self.log_partition(lam)
        if lam.ndim == 2 and feats.ndim == 2 and feats.shape[0] != lam.shape[0]:
            raise DimensionMismatchError('action batch', lam.shape[0], feats.shape[0])
        if lam.ndim == 1:
            return feats.dot(lam) - log_z
        return np.sum(lam * feats, axis=-1) - log_z

    def log_prob_gradient(self, params, actions):
        """Score function ``T(a) - E[T]``, the gradient of :meth:`log_prob` in ``lambda``."""
        lam = self._lambda(params)
        feats = features(self._actions(actions), self.basis, self.kind)
        return feats - self.expected_features(lam)

    def entropy(self, params):
        """Entropy ``-sum_x pi(x) log pi(x) w(x)`` on the grid.

        Returns
        -------
        :obj:`float` or :class:`numpy.ndarray`
        """
        log_density = self.grid_log_density(params)
        masses = np.exp(log_density + self.grid.log_weights)
        return -np.sum(masses * log_density, axis=-1)

    def entropy_gradient(self, params):
        """Exact gradient of :meth:`entropy` with respect to ``lambda``.

        Equals ``-Cov(log pi, T)`` under the grid masses.
        """
        log_density = self.grid_log_density(params)
        masses = np.exp(log_density + self.grid.log_weights)
        weighted = masses * log_density
        expected = masses.dot(self.features)
        return -weighted.dot(self.features) + np.sum(weighted, axis=-1, keepdims=weighted.ndim == 2) * expected

    def expected_features(self, params):
        """Expected feature vector ``E[T(a)]``, the gradient of :meth:`log_partition`."""
        return self.masses(params).dot(self.features)

    def fisher_information(self, params):
        """Exact Fisher information ``Cov(T)``, the Hessian of :meth:`log_partition`.

        Returns
        -------
        :class:`numpy.ndarray`
            Symmetric positive semi-definite ``(M, M)`` matrix.
        """
        masses = self.masses(self._lambda(params))
        if masses.ndim != 1:
            raise DimensionMismatchError('natural parameters', self.feature_count, masses.shape)
        expected = masses.dot(self.features)
        fisher = self.features.T.dot(masses[:, np.newaxis] * self.features) - np.outer(expected, expected)
        return 0.5 * (fisher + fisher.T)

    def expected_action(self, params):
        """Mean action ``sum_x mass(x) x``."""
        return self.masses(params).dot(self.grid.points)

    def kl_divergence(self, params_p, params_q):
        """Grid Kullback-Leibler divergence ``KL(p || q)``.

        Both parameter vectors must belong to this distribution's basis.
        """
        log_p = self.grid_log_density(params_p)
        log_q = self.grid_log_density(params_q)
        masses_p = np.exp(log_p + self.grid.log_weights)
        return np.sum(masses_p * (log_p - log_q), axis=-1)

    # ------------------------------------------------------------------
    # sampling
    # ------------------------------------------------------------------

    def sample_indices(self, params, rng, size=None):
        """Draw grid indices by inverse-CDF search over the grid masses.

        The index returned for a uniform draw ``u`` is the first one whose
        cumulative mass is ``>= u``, clamped to the last grid point.

        Parameters
        ----------
        params : :class:`NaturalParams` or :class:`numpy.ndarray`
            A single vector, or a batch ``(B, M)`` yielding one index per row.
        rng : :class:`numpy.random.Generator`
        size : :obj:`int`, optional
            Number of draws for a single parameter vector.

        Returns
        -------
        :obj:`int` or :class:`numpy.ndarray`
        """
        masses = self.masses(params)
        cdf = np.cumsum(masses, axis=-1)
        last = self.grid.size - 1
        if masses.ndim == 1:
            u = rng.random(size)
            return np.minimum(np.searchsorted(cdf, u, side='left'), last)
        u = rng.random(masses.shape[0])
        return np.minimum(np.sum(cdf < u[:, np.newaxis], axis=-1), last)

    def sample(self, params, rng, size=None, jitter=False, return_index=False):
        """Draw actions from the distribution.

        Actions are grid points drawn with probability equal to their mass.
        With ``jitter=True`` they are perturbed uniformly within their grid
        cell (and kept inside the box); the reported log-probability stays
        the one of the grid point.

        Parameters
        ----------
        params : :class:`NaturalParams` or :class:`numpy.ndarray`
        rng : :class:`numpy.random.Generator`
        size : :obj:`int`, optional
            Number of draws for a single parameter vector; one draw when
            omitted. Batched parameters draw one action per row.
        jitter : :obj:`bool`, optional
        return_index : :obj:`bool`, optional
            Also return the grid indices.

        Returns
        -------
        :obj:`tuple`
            ``(actions, log_probs)`` or ``(actions, log_probs, indices)``.
        """
        lam = self._lambda(params)
        indices = self.sample_indices(lam, rng, size)
        actions = self.grid.points[indices]
        log_density = self.grid_log_density(lam)
        if log_density.ndim == 1:
            log_probs = log_density[indices]
        else:
            log_probs = log_density[np.arange(log_density.shape[0]), indices]
        if jitter:
            half = 0.5 * self.grid.spacing
            actions = np.clip(actions + rng.uniform(-half, half, size=actions.shape), -1.0, 1.0)
        if return_index:
            return actions, log_probs, indices
        return actions, log_probs
