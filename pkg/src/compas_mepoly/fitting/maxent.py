from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from collections import namedtuple

import numpy as np
from compas.data import Data
from scipy.spatial import cKDTree
from scipy.special import rel_entr
from scipy.special import softmax

from compas_mepoly.exceptions import DimensionMismatchError
from compas_mepoly.exceptions import FitDivergenceError
from compas_mepoly.exceptions import MePolyError
from compas_mepoly.polynomials import ExponentSet
from compas_mepoly.polynomials import NaturalParams
from compas_mepoly.polynomials import PolyDistribution
from compas_mepoly.polynomials import features
from compas_mepoly.polynomials import l1_distance
from compas_mepoly.polynomials import precompute_features
from compas_mepoly.utilities import LOG
from compas_mepoly.utilities import write_csv

__all__ = [
    'FitConfig',
    'FitReport',
    'GridDensity',
    'MomentVector',
    'SweepRow',
    'SWEEP_HEADER',
    'boltzmann_target',
    'convergence_sweep',
    'empirical_moments',
    'fit_mle',
    'fit_moments',
    'gram_condition_number',
    'grid_moments',
    'histogram_density',
    'write_sweep_csv',
]

# sufficient-increase constant of the line search
ARMIJO = 1e-4
MIN_STEP = 1e-12


class MomentVector(Data):
    """Expected feature vector ``E[T(a)]`` of a distribution or a sample.

    Attributes
    ----------
    moments : :class:`numpy.ndarray`
        Vector of length ``M``; the constant entry is 1.
    """

    def __init__(self, moments=None, name=None):
        super(MomentVector, self).__init__(name=name)
        self.moments = moments if moments is not None else [1.0]

    @property
    def moments(self):
        return self._moments

    @moments.setter
    def moments(self, moments):
        moments = np.asarray(moments, dtype=float).reshape(-1)
        if moments.shape[0] == 0 or abs(moments[0] - 1.0) > 1e-9:
            raise ValueError('The constant moment must equal 1, got {!r}'.format(moments[:1].tolist()))
        if not np.all(np.isfinite(moments)):
            raise ValueError('Moments must be finite.')
        self._moments = moments

    def __len__(self):
        return self._moments.shape[0]

    @property
    def data(self):
        return {'moments': self.moments.tolist()}

    @data.setter
    def data(self, data):
        self.moments = data['moments']


class GridDensity(Data):
    """Probability masses over the points of a quadrature grid.

    Attributes
    ----------
    masses : :class:`numpy.ndarray`
        Non-negative, summing to 1 within ``1e-10``.
    """

    def __init__(self, masses=None, name=None):
        super(GridDensity, self).__init__(name=name)
        self.masses = masses if masses is not None else [1.0]

    @property
    def masses(self):
        return self._masses

    @masses.setter
    def masses(self, masses):
        masses = np.asarray(masses, dtype=float).reshape(-1)
        if np.any(masses < 0) or not np.all(np.isfinite(masses)):
            raise ValueError('Grid masses must be finite and non-negative.')
        if abs(masses.sum() - 1.0) > 1e-10:
            raise ValueError('Grid masses must sum to 1, got {!r}'.format(float(masses.sum())))
        self._masses = masses

    def __len__(self):
        return self._masses.shape[0]

    @property
    def data(self):
        return {'masses': self.masses.tolist()}

    @data.setter
    def data(self, data):
        self.masses = data['masses']


class FitConfig(Data):
    """Settings of the gradient-ascent fits.

    Parameters
    ----------
    step_size : :obj:`float`, optional
        Initial step of the line search. Defaults to 1.0.
    max_iters : :obj:`int`, optional
        Maximum number of iterations. Defaults to 5000.
    grad_tol : :obj:`float`, optional
        Convergence threshold on the largest free gradient entry. Defaults to ``1e-6``.
    entropy_coef : :obj:`float`, optional
        Weight ``alpha`` of the entropy bonus in :func:`fit_mle`. Defaults to 0.
    """

    def __init__(self, step_size=1.0, max_iters=5000, grad_tol=1e-6, entropy_coef=0.0, name=None):
        super(FitConfig, self).__init__(name=name)
        self.step_size = step_size
        self.max_iters = max_iters
        self.grad_tol = grad_tol
        self.entropy_coef = entropy_coef

    @property
    def step_size(self):
        return self._step_size

    @step_size.setter
    def step_size(self, value):
        if value <= 0:
            raise ValueError('step_size must be positive, got {!r}'.format(value))
        self._step_size = float(value)

    @property
    def max_iters(self):
        return self._max_iters

    @max_iters.setter
    def max_iters(self, value):
        if int(value) != value or value < 1:
            raise ValueError('max_iters must be a positive integer, got {!r}'.format(value))
        self._max_iters = int(value)

    @property
    def grad_tol(self):
        return self._grad_tol

    @grad_tol.setter
    def grad_tol(self, value):
        if value <= 0:
            raise ValueError('grad_tol must be positive, got {!r}'.format(value))
        self._grad_tol = float(value)

    @property
    def entropy_coef(self):
        return self._entropy_coef

    @entropy_coef.setter
    def entropy_coef(self, value):
        if value < 0:
            raise ValueError('entropy_coef must be non-negative, got {!r}'.format(value))
        self._entropy_coef = float(value)

    @property
    def data(self):
        return {
            'step_size': self.step_size,
            'max_iters': self.max_iters,
            'grad_tol': self.grad_tol,
            'entropy_coef': self.entropy_coef,
        }

    @data.setter
    def data(self, data):
        self.step_size = data.get('step_size', 1.0)
        self.max_iters = data.get('max_iters', 5000)
        self.grad_tol = data.get('grad_tol', 1e-6)
        self.entropy_coef = data.get('entropy_coef', 0.0)


class FitReport(Data):
    """Outcome of a fit, serialized next to the fitted parameters.

    Attributes
    ----------
    converged : :obj:`bool`
    iterations : :obj:`int`
        Accepted ascent iterations.
    losses : :obj:`list` of :obj:`float`
        Loss after every accepted iteration (negative objective).
    nll : :obj:`float`
        Final negative mean log-likelihood of the target moments.
    entropy : :obj:`float`
        Final grid entropy.
    grad_norm : :obj:`float`
        Final largest gradient entry over the constrained moments.
    moments : :obj:`list` of :obj:`float`
        Expected features of the fit.
    target : :obj:`list` of :obj:`float`
        Target or empirical moments.
    message : :obj:`str`
    """

    def __init__(self, converged=False, iterations=0, losses=None, nll=float('nan'), entropy=float('nan'),
                 grad_norm=float('nan'), moments=None, target=None, message='', name=None):
        super(FitReport, self).__init__(name=name)
        self.converged = bool(converged)
        self.iterations = int(iterations)
        self.losses = list(losses or [])
        self.nll = float(nll)
        self.entropy = float(entropy)
        self.grad_norm = float(grad_norm)
        self.moments = list(moments if moments is not None else [])
        self.target = list(target if target is not None else [])
        self.message = message

    def __repr__(self):
        return 'FitReport(converged={}, iterations={}, nll={:.6g}, grad_norm={:.3g})'.format(
            self.converged, self.iterations, self.nll, self.grad_norm)

    @property
    def data(self):
        return {
            'converged': self.converged,
            'iterations': self.iterations,
            'losses': self.losses,
            'nll': self.nll,
            'entropy': self.entropy,
            'grad_norm': self.grad_norm,
            'moments': self.moments,
            'target': self.target,
            'message': self.message,
        }

    @data.setter
    def data(self, data):
        self.converged = bool(data['converged'])
        self.iterations = int(data['iterations'])
        self.losses = list(data.get('losses', []))
        self.nll = float(data['nll'])
        self.entropy = float(data['entropy'])
        self.grad_norm = float(data['grad_norm'])
        self.moments = list(data.get('moments', []))
        self.target = list(data.get('target', []))
        self.message = data.get('message', '')


def empirical_moments(samples, basis, kind='legendre'):
    """Mean feature vector of a set of actions.

    Parameters
    ----------
    samples : :class:`numpy.ndarray`
        Actions of shape ``(N, dim)`` with ``N >= 1``; entries outside the
        box are clamped.
    basis : :class:`compas_mepoly.polynomials.ExponentSet`
    kind : {'legendre', 'monomial'}, optional

    Returns
    -------
    :class:`MomentVector`
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples.reshape(-1, basis.dim)
    if samples.shape[0] == 0:
        raise ValueError('Cannot compute moments of an empty sample.')
    if np.any(np.abs(samples) > 1.0):
        LOG.warning('Samples outside [-1, 1]^%d were clamped to the box.', basis.dim)
        samples = np.clip(samples, -1.0, 1.0)
    return MomentVector(features(samples, basis, kind).mean(axis=0))


def grid_moments(density, table):
    """Moments of an arbitrary grid density.

    Parameters
    ----------
    density : :class:`GridDensity`
    table : :class:`compas_mepoly.polynomials.GridFeatureTable`

    Returns
    -------
    :class:`MomentVector`
    """
    if len(density) != table.shape[0]:
        raise DimensionMismatchError('grid density', table.shape[0], len(density))
    moments = density.masses.dot(table.features)
    moments[0] = 1.0
    return MomentVector(moments)


def boltzmann_target(reward_fn, grid, alpha):
    """The maximum-entropy optimal policy ``pi*(a) ~ exp(r(a) / alpha)`` on a grid.

    Parameters
    ----------
    reward_fn : callable
        Maps a ``(N, dim)`` array of points to ``N`` rewards.
    grid : :class:`compas_mepoly.polynomials.ProductGrid`
    alpha : :obj:`float`
        Positive temperature.

    Returns
    -------
    :class:`GridDensity`
        Masses proportional to ``exp(r(x) / alpha + log w(x))``.
    """
    if alpha <= 0:
        raise ValueError('alpha must be positive, got {!r}'.format(alpha))
    rewards = np.asarray(reward_fn(grid.points), dtype=float).reshape(-1)
    masses = softmax(rewards / alpha + grid.log_weights)
    return GridDensity(masses / masses.sum())


def histogram_density(samples, grid):
    """Empirical grid density: the fraction of samples nearest to every grid point.

    Parameters
    ----------
    samples : :class:`numpy.ndarray`
        Actions of shape ``(N, dim)``.
    grid : :class:`compas_mepoly.polynomials.ProductGrid`

    Returns
    -------
    :class:`GridDensity`
    """
    samples = np.asarray(samples, dtype=float).reshape(-1, grid.dim)
    if samples.shape[0] == 0:
        raise ValueError('Cannot build a histogram of an empty sample.')
    _, nearest = cKDTree(grid.points).query(np.clip(samples, -1.0, 1.0))
    counts = np.bincount(nearest, minlength=grid.size).astype(float)
    return GridDensity(counts / counts.sum())


def gram_condition_number(grid, basis, kind='legendre'):
    """Condition number of the weighted Gram matrix of the grid features.

    Examples
    --------
    >>> from compas_mepoly.polynomials import ExponentSet, build_grid
    >>> grid, basis = build_grid(1), ExponentSet(1, 8)
    >>> gram_condition_number(grid, basis, 'legendre') < gram_condition_number(grid, basis, 'monomial')
    True
    """
    table = precompute_features(grid, basis, kind)
    return float(np.linalg.cond(table.gram(grid.log_weights)))


def _free_gradient(lam, gradient, clip, mask):
    masked = np.where(mask, gradient, 0.0)
    pinned = ((lam >= clip) & (masked > 0)) | ((lam <= -clip) & (masked < 0))
    return np.where(pinned, 0.0, masked), masked


def _ascend(distribution, target, config, entropy_coef, mask=None):
    """Projected gradient ascent of ``<lambda, m> - A(lambda) + alpha H(lambda)``."""
    m = target.moments
    if m.shape[0] != distribution.feature_count:
        raise DimensionMismatchError('moment vector', distribution.feature_count, m.shape[0])
    mask = np.ones(m.shape[0], dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    clip = distribution.clip

    def objective(lam):
        value = lam.dot(m) - distribution.log_partition(lam)
        if entropy_coef > 0:
            value += entropy_coef * distribution.entropy(lam)
        return value

    def gradient(lam):
        grad = m - distribution.expected_features(lam)
        if entropy_coef > 0:
            grad = grad + entropy_coef * distribution.entropy_gradient(lam)
        return grad

    lam = np.zeros(m.shape[0])
    value = objective(lam)
    step = config.step_size
    losses = []
    converged = False
    message = 'reached max_iters={}'.format(config.max_iters)
    grad_norm = float('nan')

    for iteration in range(1, config.max_iters + 1):
        free, masked = _free_gradient(lam, gradient(lam), clip, mask)
        grad_norm = float(np.max(np.abs(masked)))
        if np.max(np.abs(free)) <= config.grad_tol:
            # a vanishing projected gradient with a pinned entry is a stop at the clip bound
            converged = grad_norm <= config.grad_tol
            message = 'converged' if converged else 'stopped at the lambda clip bound |lambda| = {}'.format(clip)
            break

        while True:
            candidate = np.clip(lam + step * free, -clip, clip)
            candidate_value = objective(candidate)
            if not np.isfinite(candidate_value):
                raise FitDivergenceError(iteration, -candidate_value)
            if candidate_value >= value + ARMIJO * free.dot(candidate - lam):
                break
            step *= 0.5
            if step < MIN_STEP:
                break

        if step < MIN_STEP:
            message = 'line search stalled at iteration {}'.format(iteration)
            break

        lam, value = candidate, candidate_value
        losses.append(-value)
        LOG.debug('fit iteration %d: loss=%.10g grad=%.3g step=%.3g', iteration, -value, grad_norm, step)
        step *= 2.0

    params = NaturalParams(lam, clip)
    nll = float(distribution.log_partition(lam) - lam.dot(m))
    report = FitReport(converged=converged,
                       iterations=len(losses),
                       losses=losses,
                       nll=nll,
                       entropy=float(distribution.entropy(lam)),
                       grad_norm=grad_norm,
                       moments=distribution.expected_features(lam).tolist(),
                       target=m.tolist(),
                       message=message)
    if converged:
        LOG.debug('Fit converged after %d iterations (grad %.3g).', report.iterations, grad_norm)
    else:
        LOG.warning('Fit did not converge: %s (grad %.3g).', message, grad_norm)
    return params, report


def _distribution(basis, grid, kind, table):
    return PolyDistribution(basis, grid, table=table, kind=kind)


def fit_mle(samples, basis, grid, config=None, kind='legendre', table=None):
    """Fit natural parameters to samples by maximum likelihood.

    Maximizes the mean log-likelihood plus ``config.entropy_coef`` times the
    grid entropy. The log-likelihood gradient is the difference between the
    empirical moments and the expected features, so at convergence the fit
    matches the sample moments up to ``grad_tol`` (for a zero entropy weight).

    Parameters
    ----------
    samples : :class:`numpy.ndarray`
        Non-empty array of actions ``(N, dim)``.
    basis : :class:`compas_mepoly.polynomials.ExponentSet`
    grid : :class:`compas_mepoly.polynomials.ProductGrid`
    config : :class:`FitConfig`, optional
    kind : {'legendre', 'monomial'}, optional
    table : :class:`compas_mepoly.polynomials.GridFeatureTable`, optional
        Reuse precomputed grid features.

    Returns
    -------
    :obj:`tuple`
        ``(NaturalParams, FitReport)``.

    Raises
    ------
    :class:`compas_mepoly.exceptions.FitDivergenceError`
        If the objective becomes non-finite.
    """
    config = config or FitConfig()
    target = empirical_moments(samples, basis, kind)
    distribution = _distribution(basis, grid, kind, table)
    return _ascend(distribution, target, config, config.entropy_coef)


def fit_moments(target, basis, grid, config=None, kind='legendre', table=None, mask=None):
    """Find the maximum-entropy distribution matching target moments.

    Runs dual ascent on ``<lambda, m> - A(lambda)``. When the moments are
    infeasible or on the boundary of the moment space the fit does not
    converge; this is reported in the :class:`FitReport`, not raised.

    Parameters
    ----------
    target : :class:`MomentVector`
        Target moments, constant entry 1.
    basis : :class:`compas_mepoly.polynomials.ExponentSet`
    grid : :class:`compas_mepoly.polynomials.ProductGrid`
    config : :class:`FitConfig`, optional
        ``entropy_coef`` is ignored.
    kind : {'legendre', 'monomial'}, optional
    table : :class:`compas_mepoly.polynomials.GridFeatureTable`, optional
    mask : :class:`numpy.ndarray`, optional
        Boolean vector selecting the constrained entries; the parameters of
        the other entries stay zero.

    Returns
    -------
    :obj:`tuple`
        ``(NaturalParams, FitReport)``.
    """
    config = config or FitConfig()
    if not isinstance(target, MomentVector):
        target = MomentVector(target)
    distribution = _distribution(basis, grid, kind, table)
    return _ascend(distribution, target, config, 0.0, mask=mask)


SweepRow = namedtuple('SweepRow', ['order', 'features', 'l1', 'kl', 'converged', 'iterations', 'message'])

SWEEP_HEADER = ['order', 'features', 'l1', 'kl', 'converged', 'iterations']


def convergence_sweep(target, orders, grid, config=None, kind='legendre'):
    """Fit the target's moments at increasing orders and measure the fit error.

    For every order ``K`` the maximum-entropy distribution matching the
    target's moments up to ``K`` is fitted and compared to the target by the
    grid L1 distance and ``KL(target || fit)``.

    Parameters
    ----------
    target : :class:`GridDensity`
        Masses over the points of ``grid``.
    orders : :obj:`list` of :obj:`int`
        Strictly increasing orders.
    grid : :class:`compas_mepoly.polynomials.ProductGrid`
    config : :class:`FitConfig`, optional
    kind : {'legendre', 'monomial'}, optional

    Returns
    -------
    :obj:`list` of :class:`SweepRow`
        One row per order. A failed fit yields a row with NaN distances and
        the error message.
    """
    orders = [int(order) for order in orders]
    if not orders or any(b <= a for a, b in zip(orders, orders[1:])):
        raise ValueError('orders must be non-empty and strictly increasing, got {!r}'.format(orders))
    if len(target) != grid.size:
        raise DimensionMismatchError('grid density', grid.size, len(target))

    config = config or FitConfig()
    rows = []
    for order in orders:
        try:
            basis = ExponentSet(grid.dim, order)
            table = precompute_features(grid, basis, kind)
            moments = grid_moments(target, table)
            params, report = fit_moments(moments, basis, grid, config, kind=kind, table=table)
            fitted = _distribution(basis, grid, kind, table).masses(params)
            row = SweepRow(order, basis.feature_count, l1_distance(target.masses, fitted),
                           float(np.sum(rel_entr(target.masses, fitted))), report.converged,
                           report.iterations, report.message)
        except MePolyError as error:
            LOG.warning('Sweep order %d failed: %s', order, error)
            row = SweepRow(order, 0, float('nan'), float('nan'), False, 0, str(error))
        LOG.info('order %d: L1=%.6f KL=%.6f', row.order, row.l1, row.kl)
        rows.append(row)
    return rows


def write_sweep_csv(filepath, rows):
    """Write convergence sweep rows to CSV."""
    write_csv(filepath, SWEEP_HEADER, [row[:len(SWEEP_HEADER)] for row in rows])
