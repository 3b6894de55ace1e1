"""Checkpoint files.

Network checkpoints are little-endian binary files::

    magic    8 bytes   b'MEPOLYCK'
    version  uint32
    count    uint32    number of layer sizes
    sizes    uint32 x count
    payload  float64 x parameters, layer by layer, weights (row-major) then biases

Natural-parameter checkpoints are JSON documents holding the parameters and
the settings of the distribution they belong to.
"""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os

import numpy as np
from compas.data import json_dump
from compas.data import json_load

from compas_mepoly.exceptions import CheckpointFormatError
from compas_mepoly.exceptions import CheckpointShapeError
from compas_mepoly.exceptions import CheckpointVersionError
from compas_mepoly.polynomials import NaturalParams
from compas_mepoly.utilities import ensure_directory

from .mlp import MlpParams

__all__ = [
    'CHECKPOINT_MAGIC',
    'CHECKPOINT_VERSION',
    'load_checkpoint',
    'load_natural_params',
    'save_checkpoint',
    'save_natural_params',
]

CHECKPOINT_MAGIC = b'MEPOLYCK'
CHECKPOINT_VERSION = 1

_UINT = np.dtype('<u4')
_REAL = np.dtype('<f8')


def save_checkpoint(params, path):
    """Write network parameters to a binary checkpoint.

    Parameters
    ----------
    params : :class:`compas_mepoly.networks.MlpParams`
    path : :obj:`str`
    """
    ensure_directory(os.path.dirname(path))
    header = np.array([CHECKPOINT_VERSION, len(params.sizes)] + list(params.sizes), dtype=_UINT)
    with open(path, 'wb') as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(header.tobytes())
        f.write(params.to_vector().astype(_REAL).tobytes())


def _read_uints(content, offset, count, path):
    end = offset + count * _UINT.itemsize
    if end > len(content):
        raise CheckpointFormatError(path, 'truncated header')
    return np.frombuffer(content[offset:end], dtype=_UINT).astype(int).tolist(), end


def load_checkpoint(path, expected_sizes=None):
    """Read network parameters written by :func:`save_checkpoint`.

    Parameters
    ----------
    path : :obj:`str`
    expected_sizes : :obj:`list` of :obj:`int`, optional
        Layer sizes the caller's model requires.

    Returns
    -------
    :class:`compas_mepoly.networks.MlpParams`

    Raises
    ------
    :class:`compas_mepoly.exceptions.CheckpointFormatError`
        Wrong magic bytes, truncated or oversized file.
    :class:`compas_mepoly.exceptions.CheckpointVersionError`
        Unsupported format version.
    :class:`compas_mepoly.exceptions.CheckpointShapeError`
        Layer sizes differ from ``expected_sizes``.
    """
    with open(path, 'rb') as f:
        content = f.read()

    if content[:len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise CheckpointFormatError(path, 'bad magic bytes')
    (version, count), offset = _read_uints(content, len(CHECKPOINT_MAGIC), 2, path)
    if version != CHECKPOINT_VERSION:
        raise CheckpointVersionError(path, version, CHECKPOINT_VERSION)
    sizes, offset = _read_uints(content, offset, count, path)
    if expected_sizes is not None and list(expected_sizes) != sizes:
        raise CheckpointShapeError(path, expected_sizes, sizes)

    template = MlpParams(sizes)
    expected_bytes = template.parameter_count * _REAL.itemsize
    payload = content[offset:]
    if len(payload) < expected_bytes:
        raise CheckpointFormatError(path, 'truncated payload ({} of {} bytes)'.format(len(payload), expected_bytes))
    if len(payload) > expected_bytes:
        raise CheckpointFormatError(path, 'unexpected trailing bytes')
    return template.with_vector(np.frombuffer(payload, dtype=_REAL).astype(float))


def save_natural_params(path, params, settings):
    """Write natural parameters and their distribution settings as JSON.

    Parameters
    ----------
    path : :obj:`str`
    params : :class:`compas_mepoly.polynomials.NaturalParams`
    settings : :obj:`dict`
        Typically :attr:`compas_mepoly.polynomials.PolyDistribution.settings`.
    """
    ensure_directory(os.path.dirname(path))
    document = {'format': 'mepoly-lambda', 'version': CHECKPOINT_VERSION, 'params': params.data, 'settings': settings}
    json_dump(document, path, pretty=True)


def load_natural_params(path):
    """Read a checkpoint written by :func:`save_natural_params`.

    Returns
    -------
    :obj:`tuple`
        ``(NaturalParams, settings)``.
    """
    try:
        document = json_load(path)
    except ValueError as error:
        raise CheckpointFormatError(path, 'not a JSON document ({})'.format(error))
    if not isinstance(document, dict) or document.get('format') != 'mepoly-lambda':
        raise CheckpointFormatError(path, 'not a natural-parameter checkpoint')
    if document.get('version') != CHECKPOINT_VERSION:
        raise CheckpointVersionError(path, document.get('version'), CHECKPOINT_VERSION)
    try:
        params = NaturalParams.from_data(document['params'])
        settings = dict(document['settings'])
    except (KeyError, TypeError) as error:
        raise CheckpointFormatError(path, 'missing field {}'.format(error))
    return params, settings
