from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
from scipy.linalg import LinAlgError
from scipy.linalg import solve

from compas_mepoly.exceptions import DimensionMismatchError
from compas_mepoly.exceptions import NumericalError

from .mlp import GradientBuffer

__all__ = [
    'Adam',
    'AdamState',
    'adam_step',
    'natural_gradient_step',
]


class AdamState(object):
    """First and second moment estimates of Adam and the step counter.

    Attributes
    ----------
    first : :class:`numpy.ndarray`
    second : :class:`numpy.ndarray`
    t : :obj:`int`
        Number of steps taken so far.
    """

    def __init__(self, size):
        self.first = np.zeros(size)
        self.second = np.zeros(size)
        self.t = 0

    def copy(self):
        state = AdamState(self.first.shape[0])
        state.first = self.first.copy()
        state.second = self.second.copy()
        state.t = self.t
        return state


def adam_step(values, grads, state, lr=3e-4, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=0.0):
    """One Adam descent step with bias correction and decoupled weight decay.

    The step counter of ``state`` is incremented first, so the update of the
    ``t``-th call uses ``t >= 1`` in the bias corrections. ``state`` is
    updated in place.

    Parameters
    ----------
    values : :class:`numpy.ndarray`
        Flat parameter vector.
    grads : :class:`numpy.ndarray`
        Gradient of the loss to minimize, same shape.
    state : :class:`AdamState`
    lr, beta1, beta2, eps : :obj:`float`, optional
    weight_decay : :obj:`float`, optional
        Decoupled decay factor, 0 by default.

    Returns
    -------
    :class:`numpy.ndarray`
        The updated parameter vector.

    Examples
    --------
    >>> state = AdamState(2)
    >>> adam_step(np.zeros(2), np.array([0.5, -2.0]), state, lr=0.1).round(6).tolist()
    [-0.1, 0.1]
    """
    values = np.asarray(values, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if values.shape != grads.shape or values.shape != state.first.shape:
        raise DimensionMismatchError('gradient', values.shape, grads.shape)

    state.t += 1
    state.first = beta1 * state.first + (1.0 - beta1) * grads
    state.second = beta2 * state.second + (1.0 - beta2) * grads * grads
    first_hat = state.first / (1.0 - beta1 ** state.t)
    second_hat = state.second / (1.0 - beta2 ** state.t)

    updated = values - lr * first_hat / (np.sqrt(second_hat) + eps)
    if weight_decay:
        updated = updated - lr * weight_decay * values
    return updated


def natural_gradient_step(values, grads, fisher, lr=0.2, damping=1e-4, max_kl=0.01):
    """One damped natural-gradient ascent step inside a KL trust region.

    Solves ``(F + eps I) d = g`` with ``eps = damping * trace(F) / M``. If
    the local KL estimate ``0.5 lr^2 d^T F d`` exceeds ``max_kl`` the step
    is shortened to meet it.

    Parameters
    ----------
    values : :class:`numpy.ndarray`
        Flat parameter vector of size ``M``.
    grads : :class:`numpy.ndarray`
        Gradient of the objective to maximize, same shape.
    fisher : :class:`numpy.ndarray`
        ``(M, M)`` Fisher information at ``values``.
    lr : :obj:`float`, optional
    damping : :obj:`float`, optional
        Relative Tikhonov damping, positive.
    max_kl : :obj:`float`, optional
        Trust region radius in nats, ``0`` disables it.

    Returns
    -------
    :class:`numpy.ndarray`
        The updated parameter vector.

    Examples
    --------
    >>> natural_gradient_step(np.zeros(2), np.array([1.0, 0.5]), np.diag([2.0, 0.5]), lr=1.0, damping=1e-12, max_kl=0.0).round(6).tolist()
    [0.5, 1.0]
    """
    values = np.asarray(values, dtype=float)
    grads = np.asarray(grads, dtype=float)
    fisher = np.asarray(fisher, dtype=float)
    size = values.shape[0]
    if grads.shape != values.shape or fisher.shape != (size, size):
        raise DimensionMismatchError('natural gradient', (size, size), fisher.shape)

    eps = damping * max(np.trace(fisher), 1e-12) / size
    try:
        direction = solve(fisher + eps * np.eye(size), grads, assume_a='pos')
    except (LinAlgError, ValueError) as error:
        raise NumericalError('Natural gradient solve failed: {}'.format(error))
    if not np.all(np.isfinite(direction)):
        raise NumericalError('Non-finite natural gradient direction.')

    quadratic = float(direction.dot(fisher).dot(direction))
    scale = lr
    if max_kl and 0.5 * lr * lr * quadratic > max_kl:
        scale = np.sqrt(2.0 * max_kl / quadratic)
    return values + scale * direction


class Adam(object):
    """Adam optimizer bound to one set of network parameters.

    Parameters
    ----------
    params : :class:`compas_mepoly.networks.MlpParams`
        Used for sizing the moment estimates.
    lr : :obj:`float`, optional
    beta1, beta2, eps, weight_decay : :obj:`float`, optional
    """

    def __init__(self, params, lr=3e-4, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=0.0):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.state = AdamState(params.parameter_count)

    def step(self, params, grads):
        """Return new parameters after one descent step along ``grads``.

        Parameters
        ----------
        params : :class:`compas_mepoly.networks.MlpParams`
        grads : :class:`compas_mepoly.networks.GradientBuffer`

        Returns
        -------
        :class:`compas_mepoly.networks.MlpParams`
        """
        if not isinstance(grads, GradientBuffer) or not grads.matches(params):
            raise DimensionMismatchError('gradient buffer', params.sizes, 'incompatible buffer')
        values = adam_step(params.to_vector(), grads.to_vector(), self.state, self.lr,
                           self.beta1, self.beta2, self.eps, self.weight_decay)
        return params.with_vector(values)

    def snapshot(self):
        return self.state.copy()

    def restore(self, state):
        self.state = state.copy()
