from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
from compas.data import Data
from scipy.special import comb

from compas_mepoly.exceptions import BasisSizeError
from compas_mepoly.exceptions import DimensionMismatchError
from compas_mepoly.utilities import LOG

__all__ = [
    'FEATURE_KINDS',
    'MAX_FEATURES',
    'ExponentSet',
    'enumerate_exponents',
    'feature_count',
    'features',
    'legendre_table',
    'monomial_table',
]

#: Default cap on the number of basis functions of one exponent set.
MAX_FEATURES = 20000

#: Supported feature families.
FEATURE_KINDS = ('legendre', 'monomial')


def _check_dim_and_order(dim, order):
    if int(dim) != dim or dim < 1:
        raise ValueError('dim must be a positive integer, got {!r}'.format(dim))
    if int(order) != order or order < 0:
        raise ValueError('order must be a non-negative integer, got {!r}'.format(order))


def feature_count(dim, order, max_features=MAX_FEATURES):
    """Number of multi-indices of ``dim`` variables with total degree at most ``order``.

    Parameters
    ----------
    dim : :obj:`int`
        Number of variables, at least 1.
    order : :obj:`int`
        Maximal total degree, at least 0.
    max_features : :obj:`int`, optional
        Cap on the result. Defaults to :data:`MAX_FEATURES`.

    Returns
    -------
    :obj:`int`
        The binomial coefficient ``C(dim + order, dim)``.

    Raises
    ------
    :class:`compas_mepoly.exceptions.BasisSizeError`
        If the count exceeds ``max_features``.

    Examples
    --------
    >>> feature_count(3, 3)
    20
    """
    _check_dim_and_order(dim, order)
    count = int(comb(dim + order, dim, exact=True))
    if max_features is not None and count > max_features:
        raise BasisSizeError(dim, order, count, max_features)
    return count


def _iter_exponents(dim, degree_limit):
    # lexicographic over degree tuples, all-zero first
    if dim == 1:
        for degree in range(degree_limit + 1):
            yield (degree,)
        return
    for degree in range(degree_limit + 1):
        for rest in _iter_exponents(dim - 1, degree_limit - degree):
            yield (degree,) + rest


class ExponentSet(Data):
    """The ordered multi-indices of a total-degree polynomial basis.

    Exponent vectors are listed lexicographically over their degree tuples,
    so the all-zero index (the constant feature) is always first and the
    ordering is identical on every run.

    Parameters
    ----------
    dim : :obj:`int`, optional
        Number of variables.
    order : :obj:`int`, optional
        Maximal total degree.
    max_features : :obj:`int`, optional
        Cap on the number of exponent vectors.

    Attributes
    ----------
    dim : :obj:`int`
        Number of variables.
    order : :obj:`int`
        Maximal total degree.
    exponents : :class:`numpy.ndarray`
        Integer array of shape ``(M, dim)``.
    """

    def __init__(self, dim=1, order=0, max_features=MAX_FEATURES, name=None):
        super(ExponentSet, self).__init__(name=name)
        count = feature_count(dim, order, max_features)
        self._dim = int(dim)
        self._order = int(order)
        self._exponents = np.array(list(_iter_exponents(self._dim, self._order)), dtype=int).reshape(count, self._dim)
        self._exponents.setflags(write=False)
        self._lookup = None

    @property
    def dim(self):
        return self._dim

    @property
    def order(self):
        return self._order

    @property
    def exponents(self):
        return self._exponents

    @property
    def feature_count(self):
        """:obj:`int` : Number of exponent vectors ``M``."""
        return self._exponents.shape[0]

    @property
    def degrees(self):
        """:class:`numpy.ndarray` : Total degree of every exponent vector."""
        return self._exponents.sum(axis=1)

    def index(self, alpha):
        """Position of the exponent vector ``alpha`` in the canonical ordering."""
        if self._lookup is None:
            self._lookup = {tuple(int(v) for v in row): i for i, row in enumerate(self._exponents)}
        try:
            return self._lookup[tuple(int(v) for v in alpha)]
        except KeyError:
            raise ValueError('{} is not an exponent vector of this basis'.format(tuple(alpha)))

    def __len__(self):
        return self.feature_count

    def __iter__(self):
        return (tuple(int(v) for v in row) for row in self._exponents)

    def __eq__(self, other):
        return isinstance(other, ExponentSet) and self.dim == other.dim and self.order == other.order

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.dim, self.order))

    def __repr__(self):
        return 'ExponentSet(dim={}, order={})'.format(self.dim, self.order)

    @property
    def data(self):
        """:obj:`dict` : The data representing the exponent set."""
        return {'dim': self.dim, 'order': self.order}

    @data.setter
    def data(self, data):
        other = ExponentSet(data['dim'], data['order'], max_features=None)
        self._dim = other._dim
        self._order = other._order
        self._exponents = other._exponents
        self._lookup = None


def enumerate_exponents(dim, order, max_features=MAX_FEATURES):
    """Enumerate all exponent vectors with total degree at most ``order``.

    Parameters
    ----------
    dim : :obj:`int`
        Number of variables, at least 1.
    order : :obj:`int`
        Maximal total degree.
    max_features : :obj:`int`, optional
        Cap on the number of vectors.

    Returns
    -------
    :class:`ExponentSet`

    Examples
    --------
    >>> basis = enumerate_exponents(2, 1)
    >>> list(basis)
    [(0, 0), (0, 1), (1, 0)]
    """
    return ExponentSet(dim, order, max_features=max_features)


def _flag_out_of_box(x):
    if np.any(np.abs(x) > 1.0):
        LOG.debug('Polynomial evaluated outside [-1, 1]: max |x| = %g', float(np.max(np.abs(x))))


def legendre_table(x, max_order):
    """Evaluate the Legendre polynomials ``P_0 .. P_max_order`` at ``x``.

    Uses the three-term recurrence
    ``P_n = ((2n - 1) / n) x P_{n-1} - ((n - 1) / n) P_{n-2}``.

    Parameters
    ----------
    x : :obj:`float` or :class:`numpy.ndarray`
        Evaluation points, normally in ``[-1, 1]``. Points outside are
        evaluated as well and only reported at debug level.
    max_order : :obj:`int`
        Highest degree.

    Returns
    -------
    :class:`numpy.ndarray`
        Array of shape ``x.shape + (max_order + 1,)``.

    Examples
    --------
    >>> legendre_table(0.5, 2).tolist()
    [1.0, 0.5, -0.125]
    """
    x = np.asarray(x, dtype=float)
    _flag_out_of_box(x)
    table = np.empty(x.shape + (max_order + 1,), dtype=float)
    table[..., 0] = 1.0
    if max_order >= 1:
        table[..., 1] = x
    for n in range(2, max_order + 1):
        table[..., n] = ((2 * n - 1) / n) * x * table[..., n - 1] - ((n - 1) / n) * table[..., n - 2]
    return table


def monomial_table(x, max_order):
    """Evaluate the powers ``x^0 .. x^max_order``.

    Returns
    -------
    :class:`numpy.ndarray`
        Array of shape ``x.shape + (max_order + 1,)``.
    """
    x = np.asarray(x, dtype=float)
    _flag_out_of_box(x)
    return x[..., np.newaxis] ** np.arange(max_order + 1)


def features(points, basis, kind='legendre'):
    """Evaluate the feature vector ``T(a)`` of a basis at one or many points.

    The entry for the exponent vector ``alpha`` is ``prod_i P_{alpha_i}(a_i)``
    for the ``'legendre'`` kind and ``prod_i a_i^{alpha_i}`` for the
    ``'monomial'`` kind.

    Parameters
    ----------
    points : :class:`numpy.ndarray`
        One point of shape ``(dim,)`` or a batch of shape ``(N, dim)``.
    basis : :class:`ExponentSet`
        The exponent set.
    kind : {'legendre', 'monomial'}, optional
        Feature family.

    Returns
    -------
    :class:`numpy.ndarray`
        Shape ``(M,)`` for a single point, ``(N, M)`` for a batch.
    """
    if kind not in FEATURE_KINDS:
        raise ValueError('Unknown feature kind {!r}, expected one of {}'.format(kind, FEATURE_KINDS))
    points = np.asarray(points, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    if points.shape[-1] != basis.dim:
        raise DimensionMismatchError('point', basis.dim, points.shape[-1])

    table = legendre_table if kind == 'legendre' else monomial_table
    result = np.ones((points.shape[0], basis.feature_count), dtype=float)
    for axis in range(basis.dim):
        values = table(points[:, axis], basis.order)
        result *= values[:, basis.exponents[:, axis]]
    return result[0] if single else result
