"""
********************************************************************************
compas_mepoly.fitting
********************************************************************************

.. currentmodule:: compas_mepoly.fitting

Maximum-entropy fitting of natural parameters, from samples (maximum
likelihood) or from moment constraints, and the reward-derived targets the
fits are measured against.

Fitting
=======

.. autosummary::
    :toctree: generated/
    :nosignatures:

    FitConfig
    FitReport
    MomentVector
    GridDensity
    empirical_moments
    fit_mle
    fit_moments
    grid_moments
    histogram_density

Targets and sweeps
==================

.. autosummary::
    :toctree: generated/
    :nosignatures:

    ManifoldReward
    manifold_reward
    boltzmann_target
    convergence_sweep
    SweepRow
    write_sweep_csv
    gram_condition_number

"""

from .rewards import (
    DEFAULT_SIGMA,
    ManifoldReward,
    manifold_reward,
)
from .maxent import (
    SWEEP_HEADER,
    FitConfig,
    FitReport,
    GridDensity,
    MomentVector,
    SweepRow,
    boltzmann_target,
    convergence_sweep,
    empirical_moments,
    fit_mle,
    fit_moments,
    gram_condition_number,
    grid_moments,
    histogram_density,
    write_sweep_csv,
)

__all__ = [
    'DEFAULT_SIGMA',
    'ManifoldReward',
    'manifold_reward',
    'SWEEP_HEADER',
    'FitConfig',
    'FitReport',
    'GridDensity',
    'MomentVector',
    'SweepRow',
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
