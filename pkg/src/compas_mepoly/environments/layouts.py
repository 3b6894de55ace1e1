from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os

import compas_mepoly

from .smooth_world import read_layout

__all__ = [
    'LAYOUTS',
    'layout_path',
    'load_named_layout',
]

#: Layouts shipped in ``compas_mepoly/data/layouts``.
LAYOUTS = ('two_goals', 'slit_wall', 'obstacle_detour')


def layout_path(name_or_path):
    """Resolve a shipped layout name, or pass a file path through unchanged.

    Examples
    --------
    >>> os.path.basename(layout_path('two_goals'))
    'two_goals.json'
    """
    if name_or_path in LAYOUTS:
        return compas_mepoly.get('layouts/{}.json'.format(name_or_path))
    return name_or_path


def load_named_layout(name_or_path):
    """Load a shipped layout by name, or any layout file by path.

    Returns
    -------
    :class:`compas_mepoly.environments.SmoothWorld`
    """
    return read_layout(layout_path(name_or_path))
