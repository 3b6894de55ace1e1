"""
********************************************************************************
compas_mepoly.training
********************************************************************************

.. currentmodule:: compas_mepoly.training

Trainers for polynomial policies: exact-entropy ascent on the single-state
bandit with directly learned natural parameters, and PPO with a clipped
surrogate and an exact entropy bonus for Smooth World.

Policies and rollouts
=====================

.. autosummary::
    :toctree: generated/
    :nosignatures:

    PolyPolicy
    RolloutBuffer
    collect_rollouts
    compute_gae

PPO
===

.. autosummary::
    :toctree: generated/
    :nosignatures:

    PpoConfig
    PpoTrainer
    clipped_surrogate
    ppo_update

Bandit
======

.. autosummary::
    :toctree: generated/
    :nosignatures:

    BanditConfig
    BanditTrainer
    bandit_gradient
    bandit_maxent_update
    score_function_gradient

Evaluation
==========

.. autosummary::
    :toctree: generated/
    :nosignatures:

    evaluate
    cluster_terminals
    terminal_histogram
    write_terminal_histogram

"""

from .policy import (
    PolyPolicy,
)
from .rollouts import (
    RolloutBuffer,
    collect_rollouts,
    compute_gae,
)
from .evaluation import (
    CLUSTER_DISTANCE,
    HISTOGRAM_HEADER,
    cluster_terminals,
    evaluate,
    terminal_histogram,
    write_terminal_histogram,
)
from .ppo import (
    METRIC_HEADER,
    PpoConfig,
    PpoTrainer,
    clipped_surrogate,
    ppo_update,
)
from .bandit import (
    BASELINES,
    KL_TRACE_HEADER,
    OPTIMIZERS,
    BanditConfig,
    BanditTrainer,
    bandit_gradient,
    bandit_maxent_update,
    score_function_gradient,
)

__all__ = [
    'PolyPolicy',
    'RolloutBuffer',
    'collect_rollouts',
    'compute_gae',
    'CLUSTER_DISTANCE',
    'HISTOGRAM_HEADER',
    'cluster_terminals',
    'evaluate',
    'terminal_histogram',
    'write_terminal_histogram',
    'METRIC_HEADER',
    'PpoConfig',
    'PpoTrainer',
    'clipped_surrogate',
    'ppo_update',
    'BASELINES',
    'KL_TRACE_HEADER',
    'OPTIMIZERS',
    'BanditConfig',
    'BanditTrainer',
    'bandit_gradient',
    'bandit_maxent_update',
    'score_function_gradient',
]
