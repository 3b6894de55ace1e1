"""
********************************************************************************
compas_mepoly.exceptions
********************************************************************************

.. currentmodule:: compas_mepoly.exceptions

.. autosummary::
    :toctree: generated/
    :nosignatures:

    MePolyError
    BasisSizeError
    DimensionMismatchError
    NumericalError
    FitDivergenceError
    CheckpointError
    CheckpointFormatError
    CheckpointVersionError
    CheckpointShapeError
    StaleCacheError
    LayoutError

"""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

__all__ = [
    'MePolyError',
    'BasisSizeError',
    'DimensionMismatchError',
    'NumericalError',
    'FitDivergenceError',
    'CheckpointError',
    'CheckpointFormatError',
    'CheckpointVersionError',
    'CheckpointShapeError',
    'StaleCacheError',
    'LayoutError',
]


class MePolyError(Exception):
    """Base class of all errors raised by ``compas_mepoly``."""

    def __init__(self, message):
        super(MePolyError, self).__init__(message)


class BasisSizeError(MePolyError):
    """Indicates that a polynomial basis would exceed the feature cap."""

    def __init__(self, dim, order, count, cap):
        message = 'Basis of dimension {} and order {} has {} features, above the cap of {}.'.format(dim, order, count, cap)
        super(BasisSizeError, self).__init__(message)
        self.count = count
        self.cap = cap


class DimensionMismatchError(MePolyError):
    """Indicates that two objects disagree on their dimension or length."""

    def __init__(self, what, expected, actual):
        message = 'Expected {} of size {}, got {}.'.format(what, expected, actual)
        super(DimensionMismatchError, self).__init__(message)
        self.expected = expected
        self.actual = actual


class NumericalError(MePolyError):
    """Indicates non-finite natural parameters, densities or losses."""

    def __init__(self, message):
        super(NumericalError, self).__init__(message)


class FitDivergenceError(NumericalError):
    """Raised when an optimizer produces a non-finite objective."""

    def __init__(self, iteration, loss):
        message = 'Fit diverged at iteration {} with loss {!r}.'.format(iteration, loss)
        super(FitDivergenceError, self).__init__(message)
        self.iteration = iteration
        self.loss = loss


class CheckpointError(MePolyError):
    """Base case for checkpoint reading and writing errors."""

    def __init__(self, message):
        super(CheckpointError, self).__init__(message)


class CheckpointFormatError(CheckpointError):
    """The file is not a checkpoint, or it is truncated."""

    def __init__(self, path, reason):
        message = "Invalid checkpoint '{}': {}".format(path, reason)
        super(CheckpointFormatError, self).__init__(message)


class CheckpointVersionError(CheckpointError):
    """The checkpoint was written by an unsupported format version."""

    def __init__(self, path, version, supported):
        message = "Checkpoint '{}' has format version {}, supported is {}.".format(path, version, supported)
        super(CheckpointVersionError, self).__init__(message)
        self.version = version


class CheckpointShapeError(CheckpointError):
    """The checkpoint layer sizes do not match the requested model."""

    def __init__(self, path, expected, actual):
        message = "Checkpoint '{}' has layer sizes {}, expected {}.".format(path, list(actual), list(expected))
        super(CheckpointShapeError, self).__init__(message)


class StaleCacheError(MePolyError):
    """A backward pass was requested with activations of different parameters."""

    def __init__(self):
        super(StaleCacheError, self).__init__('Forward cache does not belong to the current parameters.')


class LayoutError(MePolyError):
    """Schema or syntax error in a layout or configuration document.

    Attributes
    ----------
    field : :obj:`str` or ``None``
        Path of the offending field, e.g. ``'goals[1].region'``.
    line : :obj:`int` or ``None``
        Line number of a syntax error.
    """

    def __init__(self, reason, field=None, line=None, source=None):
        location = []
        if source:
            location.append(str(source))
        if line is not None:
            location.append('line {}'.format(line))
        if field:
            location.append("field '{}'".format(field))
        prefix = ', '.join(location)
        message = '{}: {}'.format(prefix, reason) if prefix else reason
        super(LayoutError, self).__init__(message)
        self.field = field
        self.line = line
        self.reason = reason
