"""
********************************************************************************
compas_mepoly.polynomials
********************************************************************************

.. currentmodule:: compas_mepoly.polynomials

The polynomial exponential family on the box ``[-1, 1]^d``: the multi-index
basis, the quadrature grids it is integrated on, and the distribution itself.

Basis
=====

.. autosummary::
    :toctree: generated/
    :nosignatures:

    ExponentSet
    enumerate_exponents
    feature_count
    features
    legendre_table
    monomial_table

Quadrature
==========

.. autosummary::
    :toctree: generated/
    :nosignatures:

    Grid1D
    ProductGrid
    GridFeatureTable
    trapezoid_grid
    product_grid
    stochastic_grid
    build_grid
    precompute_features

Distribution
============

.. autosummary::
    :toctree: generated/
    :nosignatures:

    NaturalParams
    PolyDistribution
    clip_lambda
    clip_params
    l1_distance

"""

from .basis import (
    FEATURE_KINDS,
    MAX_FEATURES,
    ExponentSet,
    enumerate_exponents,
    feature_count,
    features,
    legendre_table,
    monomial_table,
)
from .quadrature import (
    DEFAULT_GRID_SIZE,
    FULL_GRID_MAX_DIM,
    STOCHASTIC_GRID_SIZE,
    Grid1D,
    GridFeatureTable,
    ProductGrid,
    build_grid,
    precompute_features,
    product_grid,
    stochastic_grid,
    trapezoid_grid,
)
from .distribution import (
    LAMBDA_CLIP,
    NaturalParams,
    PolyDistribution,
    clip_lambda,
    clip_params,
    l1_distance,
)

__all__ = [
    'FEATURE_KINDS',
    'MAX_FEATURES',
    'ExponentSet',
    'enumerate_exponents',
    'feature_count',
    'features',
    'legendre_table',
    'monomial_table',
    'DEFAULT_GRID_SIZE',
    'FULL_GRID_MAX_DIM',
    'STOCHASTIC_GRID_SIZE',
    'Grid1D',
    'GridFeatureTable',
    'ProductGrid',
    'build_grid',
    'precompute_features',
    'product_grid',
    'stochastic_grid',
    'trapezoid_grid',
    'LAMBDA_CLIP',
    'NaturalParams',
    'PolyDistribution',
    'clip_lambda',
    'clip_params',
    'l1_distance',
]
