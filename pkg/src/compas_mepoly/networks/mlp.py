from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import itertools

import numpy as np
from compas.data import Data

from compas_mepoly.exceptions import DimensionMismatchError
from compas_mepoly.exceptions import StaleCacheError

__all__ = [
    'HIDDEN_SIZES',
    'ForwardCache',
    'GradientBuffer',
    'MlpParams',
    'backward',
    'forward',
    'forward_with_cache',
    'relu',
]

HIDDEN_SIZES = (256, 256)

_tokens = itertools.count()


def relu(x):
    return np.maximum(x, 0.0)


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


class MlpParams(Data):
    """Weights and biases of a fully-connected network.

    Hidden layers use rectified-linear activations, the output layer is the
    identity. Arrays are read-only: every update creates a new instance, so
    activations cached by :func:`forward_with_cache` can be matched to the
    parameters they were computed with.

    Parameters
    ----------
    sizes : :obj:`list` of :obj:`int`
        Layer sizes ``[input, hidden..., output]``.
    weights : :obj:`list` of :class:`numpy.ndarray`
        One ``(out, in)`` matrix per layer.
    biases : :obj:`list` of :class:`numpy.ndarray`
        One ``(out,)`` vector per layer.
    """

    def __init__(self, sizes=(1, 1), weights=None, biases=None, name=None):
        super(MlpParams, self).__init__(name=name)
        self._set(sizes, weights, biases)

    def _set(self, sizes, weights, biases):
        sizes = [int(size) for size in sizes]
        if len(sizes) < 2 or any(size < 1 for size in sizes):
            raise ValueError('An MLP needs at least two positive layer sizes, got {!r}'.format(sizes))
        shapes = list(zip(sizes[1:], sizes[:-1]))
        if weights is None:
            weights = [np.zeros(shape) for shape in shapes]
        if biases is None:
            biases = [np.zeros(shape[0]) for shape in shapes]
        if len(weights) != len(shapes) or len(biases) != len(shapes):
            raise DimensionMismatchError('layer count', len(shapes), (len(weights), len(biases)))
        self.sizes = sizes
        self.weights = [_frozen(w) for w in weights]
        self.biases = [_frozen(b) for b in biases]
        for w, b, shape in zip(self.weights, self.biases, shapes):
            if w.shape != shape or b.shape != (shape[0],):
                raise DimensionMismatchError('layer', shape, (w.shape, b.shape))
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError('MLP parameters must be finite.')
        self.token = next(_tokens)

    @classmethod
    def initialize(cls, input_size, output_size, hidden_sizes=HIDDEN_SIZES, seed=0, zero_output=True):
        """Uniform fan-in initialization ``U(-1/sqrt(fan_in), 1/sqrt(fan_in))``, zero biases.

        With ``zero_output`` the last layer starts at zero, so the network
        outputs zeros for every state.
        """
        rng = np.random.default_rng(seed)
        sizes = [input_size] + list(hidden_sizes) + [output_size]
        weights = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        if zero_output:
            weights[-1] = np.zeros_like(weights[-1])
        return cls(sizes, weights)

    @property
    def input_size(self):
        return self.sizes[0]

    @property
    def output_size(self):
        return self.sizes[-1]

    @property
    def parameter_count(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def __repr__(self):
        return 'MlpParams(sizes={})'.format(self.sizes)

    def to_vector(self):
        """All parameters as one flat vector, layer by layer, weights before biases."""
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b)
        return np.concatenate(parts)

    def with_vector(self, vector):
        """New parameters of the same shape filled from a flat vector."""
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.parameter_count,):
            raise DimensionMismatchError('parameter vector', self.parameter_count, vector.shape)
        weights, biases = [], []
        offset = 0
        for w, b in zip(self.weights, self.biases):
            weights.append(vector[offset:offset + w.size].reshape(w.shape))
            offset += w.size
            biases.append(vector[offset:offset + b.size])
            offset += b.size
        return MlpParams(self.sizes, weights, biases)

    @property
    def data(self):
        return {
            'sizes': self.sizes,
            'weights': [w.tolist() for w in self.weights],
            'biases': [b.tolist() for b in self.biases],
        }

    @data.setter
    def data(self, data):
        self._set(data['sizes'], data['weights'], data['biases'])


class ForwardCache(object):
    """Activations of one forward pass, needed by :func:`backward`."""

    def __init__(self, token, inputs, pre_activations, activations):
        self.token = token
        self.inputs = inputs
        self.pre_activations = pre_activations
        self.activations = activations


def _inputs(params, states):
    states = np.asarray(states, dtype=float)
    single = states.ndim == 1
    states = np.atleast_2d(states)
    if states.shape[-1] != params.input_size:
        raise DimensionMismatchError('state', params.input_size, states.shape[-1])
    return states, single


def forward_with_cache(params, states):
    """Forward pass that also returns the activations for :func:`backward`.

    Parameters
    ----------
    params : :class:`MlpParams`
    states : :class:`numpy.ndarray`
        One state ``(input,)`` or a batch ``(B, input)``.

    Returns
    -------
    :obj:`tuple`
        ``(outputs, cache)``; outputs have shape ``(output,)`` or ``(B, output)``.
    """
    x, single = _inputs(params, states)
    pre_activations, activations = [], [x]
    last = len(params.weights) - 1
    for index, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = activations[-1].dot(w.T) + b
        pre_activations.append(z)
        activations.append(z if index == last else relu(z))
    output = activations[-1]
    cache = ForwardCache(params.token, x, pre_activations, activations)
    return (output[0] if single else output), cache


def forward(params, states):
    """Evaluate the network; see :func:`forward_with_cache`."""
    output, _ = forward_with_cache(params, states)
    return output


class GradientBuffer(object):
    """Gradients of every weight and bias of an :class:`MlpParams`."""

    def __init__(self, weights, biases):
        self.weights = [np.asarray(w, dtype=float) for w in weights]
        self.biases = [np.asarray(b, dtype=float) for b in biases]

    @classmethod
    def zeros_like(cls, params):
        return cls([np.zeros_like(w) for w in params.weights], [np.zeros_like(b) for b in params.biases])

    def matches(self, params):
        """``True`` if every accumulator has the shape of the parameter it belongs to."""
        return (len(self.weights) == len(params.weights)
                and all(g.shape == w.shape for g, w in zip(self.weights, params.weights))
                and all(g.shape == b.shape for g, b in zip(self.biases, params.biases)))

    def add(self, other):
        """Accumulate another buffer in place and return ``self``."""
        for mine, theirs in zip(self.weights + self.biases, other.weights + other.biases):
            mine += theirs
        return self

    def scale(self, factor):
        for gradient in self.weights + self.biases:
            gradient *= factor
        return self

    def to_vector(self):
        """Flat vector in the order of :meth:`MlpParams.to_vector`."""
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b)
        return np.concatenate(parts)

    def norm(self):
        return float(np.sqrt(sum(np.sum(g * g) for g in self.weights + self.biases)))


def backward(params, cache, upstream):
    """Reverse-mode gradients of ``sum(upstream * outputs)`` with respect to the parameters.

    Parameters
    ----------
    params : :class:`MlpParams`
        The parameters of the forward pass.
    cache : :class:`ForwardCache`
        Activations returned by :func:`forward_with_cache` for ``params``.
    upstream : :class:`numpy.ndarray`
        Gradient with respect to the outputs, same shape as the outputs.

    Returns
    -------
    :class:`GradientBuffer`

    Raises
    ------
    :class:`compas_mepoly.exceptions.StaleCacheError`
        If the cache was computed with other parameters.
    """
    if cache.token != params.token:
        raise StaleCacheError()
    delta = np.asarray(upstream, dtype=float).reshape(cache.activations[-1].shape)

    weight_grads = [None] * len(params.weights)
    bias_grads = [None] * len(params.weights)
    for index in reversed(range(len(params.weights))):
        weight_grads[index] = delta.T.dot(cache.activations[index])
        bias_grads[index] = delta.sum(axis=0)
        if index > 0:
            delta = delta.dot(params.weights[index]) * (cache.pre_activations[index - 1] > 0)
    return GradientBuffer(weight_grads, bias_grads)
