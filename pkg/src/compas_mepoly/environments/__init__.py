"""
********************************************************************************
compas_mepoly.environments
********************************************************************************

.. currentmodule:: compas_mepoly.environments

Test environments: a single-state bandit rewarding actions near a target
manifold, and Smooth World, a 2D point-mass navigation simulator with walls,
goals and death zones.

Manifolds and bandit
====================

.. autosummary::
    :toctree: generated/
    :nosignatures:

    make_manifold
    mode_mass
    BanditEnv
    bandit_step

Smooth World
============

.. autosummary::
    :toctree: generated/
    :nosignatures:

    Region
    SmoothWorld
    Transition
    world_step
    load_layout
    read_layout
    dump_layout
    layout_path
    load_named_layout
    write_trajectory_csv

"""

from .manifolds import (
    LEMNISCATE_SCALE,
    MANIFOLD_KINDS,
    MANIFOLD_POINTS,
    MOON_OFFSET,
    MOON_RADIUS,
    make_manifold,
    mode_mass,
)
from .bandit import (
    BanditEnv,
    bandit_step,
)
from .smooth_world import (
    CAUSES,
    TRAJECTORY_HEADER,
    Region,
    SmoothWorld,
    Transition,
    dump_layout,
    load_layout,
    read_layout,
    world_step,
    write_trajectory_csv,
)
from .layouts import (
    LAYOUTS,
    layout_path,
    load_named_layout,
)

__all__ = [
    'LEMNISCATE_SCALE',
    'MANIFOLD_KINDS',
    'MANIFOLD_POINTS',
    'MOON_OFFSET',
    'MOON_RADIUS',
    'make_manifold',
    'mode_mass',
    'BanditEnv',
    'bandit_step',
    'CAUSES',
    'TRAJECTORY_HEADER',
    'Region',
    'SmoothWorld',
    'Transition',
    'dump_layout',
    'load_layout',
    'read_layout',
    'world_step',
    'write_trajectory_csv',
    'LAYOUTS',
    'layout_path',
    'load_named_layout',
]
