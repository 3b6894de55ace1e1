"""
********************************************************************************
compas_mepoly.networks
********************************************************************************

.. currentmodule:: compas_mepoly.networks

Small fully-connected conditioner networks with hand-written reverse-mode
gradients, their optimizer and checkpoint files.

Networks
========

.. autosummary::
    :toctree: generated/
    :nosignatures:

    MlpParams
    GradientBuffer
    ForwardCache
    forward
    forward_with_cache
    backward
    relu

Optimization
============

.. autosummary::
    :toctree: generated/
    :nosignatures:

    Adam
    AdamState
    adam_step
    natural_gradient_step

Checkpoints
===========

.. autosummary::
    :toctree: generated/
    :nosignatures:

    save_checkpoint
    load_checkpoint
    save_natural_params
    load_natural_params

"""

from .mlp import (
    HIDDEN_SIZES,
    ForwardCache,
    GradientBuffer,
    MlpParams,
    backward,
    forward,
    forward_with_cache,
    relu,
)
from .optimizers import (
    Adam,
    AdamState,
    adam_step,
    natural_gradient_step,
)
from .checkpoints import (
    CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
    load_checkpoint,
    load_natural_params,
    save_checkpoint,
    save_natural_params,
)

__all__ = [
    'HIDDEN_SIZES',
    'ForwardCache',
    'GradientBuffer',
    'MlpParams',
    'backward',
    'forward',
    'forward_with_cache',
    'relu',
    'Adam',
    'AdamState',
    'adam_step',
    'natural_gradient_step',
    'CHECKPOINT_MAGIC',
    'CHECKPOINT_VERSION',
    'load_checkpoint',
    'load_natural_params',
    'save_checkpoint',
    'save_natural_params',
]
