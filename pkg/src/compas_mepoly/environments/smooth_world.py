from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import json
from collections import namedtuple

import numpy as np
from compas.data import Data
from compas.data import json_dumps
from compas.data import json_loads

from compas_mepoly.exceptions import LayoutError
from compas_mepoly.utilities import write_csv

__all__ = [
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
]

CAUSES = ('goal', 'death', 'timeout', 'none')

TRAJECTORY_HEADER = ['episode', 't', 'x', 'y', 'vx', 'vy', 'reward', 'cause']

Transition = namedtuple('Transition', ['state', 'action', 'reward', 'next_state', 'done', 'cause', 'region'])
Transition.__doc__ = """One step of a :class:`SmoothWorld` episode.

``region`` is the index of the goal or death region that ended the episode,
-1 otherwise.
"""


class Region(Data):
    """Axis-aligned rectangle ``[xmin, xmax] x [ymin, ymax]`` inside ``[-1, 1]^2``."""

    def __init__(self, xmin=-1.0, ymin=-1.0, xmax=1.0, ymax=1.0, name=None):
        super(Region, self).__init__(name=name)
        self.bounds = (xmin, ymin, xmax, ymax)

    @property
    def bounds(self):
        return self._bounds

    @bounds.setter
    def bounds(self, bounds):
        xmin, ymin, xmax, ymax = [float(value) for value in bounds]
        if not (xmin < xmax and ymin < ymax):
            raise ValueError('Region bounds must satisfy xmin < xmax and ymin < ymax, got {!r}'.format(bounds))
        if min(xmin, ymin) < -1.0 or max(xmax, ymax) > 1.0:
            raise ValueError('Region {!r} leaves the box [-1, 1]^2'.format(bounds))
        self._bounds = (xmin, ymin, xmax, ymax)
        self.low = np.array([xmin, ymin])
        self.high = np.array([xmax, ymax])

    def contains(self, point):
        """Closed containment: points on the border are inside."""
        point = np.asarray(point, dtype=float)
        return bool(np.all(point >= self.low) and np.all(point <= self.high))

    def contains_interior(self, point):
        """Open containment: points on the border are outside."""
        point = np.asarray(point, dtype=float)
        return bool(np.all(point > self.low) and np.all(point < self.high))

    def segment_entry(self, start, delta):
        """Earliest ``s`` in ``[0, 1]`` at which ``start + s delta`` enters the open interior.

        Returns
        -------
        :obj:`tuple`
            ``(s, axis)`` of the entry, or ``None`` if the segment stays outside.
        """
        enter, leave, axis = -np.inf, np.inf, -1
        for i in range(2):
            if delta[i] == 0.0:
                if not (self.low[i] < start[i] < self.high[i]):
                    return None
                continue
            near = (self.low[i] - start[i]) / delta[i]
            far = (self.high[i] - start[i]) / delta[i]
            if near > far:
                near, far = far, near
            if near > enter:
                enter, axis = near, i
            leave = min(leave, far)
        if axis < 0 or enter >= leave or leave <= 0.0 or enter > 1.0 or enter < 0.0:
            return None
        return enter, axis

    def __repr__(self):
        return 'Region{}'.format(self._bounds)

    def __eq__(self, other):
        return isinstance(other, Region) and self._bounds == other._bounds

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(self._bounds)

    @property
    def data(self):
        return {'bounds': list(self._bounds)}

    @data.setter
    def data(self, data):
        self.bounds = data['bounds']


class SmoothWorld(Data):
    """A 2D point-mass navigation layout with walls, goals and death zones.

    The agent moves with ``p' = p + clip(v, -v_max, v_max) dt``. Motion stops
    at the first contact with a wall or the outer box. Entering a goal pays
    its reward, entering a death zone costs its penalty, and both end the
    episode, as does reaching ``max_steps``.

    Parameters
    ----------
    walls : :obj:`list` of :class:`Region`
    goals : :obj:`list` of :obj:`tuple`
        ``(Region, reward)`` pairs.
    deaths : :obj:`list` of :obj:`tuple`
        ``(Region, penalty)`` pairs; penalties are positive.
    start : sequence of :obj:`float`
    dt : :obj:`float`, optional
        Defaults to 0.1.
    v_max : :obj:`float`, optional
        Defaults to 1.0.
    max_steps : :obj:`int`, optional
        Defaults to 64.
    """

    def __init__(self, walls=None, goals=None, deaths=None, start=(0.0, 0.0), dt=0.1, v_max=1.0, max_steps=64, name=None):
        super(SmoothWorld, self).__init__(name=name)
        self.walls = list(walls or [])
        self.goals = [(region, float(reward)) for region, reward in (goals or [])]
        self.deaths = [(region, float(penalty)) for region, penalty in (deaths or [])]
        self.start = np.array(start, dtype=float)
        self.dt = float(dt)
        self.v_max = float(v_max)
        self.max_steps = int(max_steps)
        self.validate()

    def validate(self):
        """Check the layout invariants.

        Raises
        ------
        :class:`compas_mepoly.exceptions.LayoutError`
        """
        if self.start.shape != (2,) or np.any(np.abs(self.start) > 1.0):
            raise LayoutError('start must be a point inside [-1, 1]^2', field='start')
        for i, wall in enumerate(self.walls):
            if wall.contains_interior(self.start):
                raise LayoutError('start lies inside a wall', field='walls[{}]'.format(i))
        for i, (death, _) in enumerate(self.deaths):
            if death.contains(self.start):
                raise LayoutError('start lies inside a death zone', field='deaths[{}].region'.format(i))
        if self.dt <= 0:
            raise LayoutError('dt must be positive', field='dt')
        if self.v_max <= 0:
            raise LayoutError('v_max must be positive', field='v_max')
        if self.max_steps < 1:
            raise LayoutError('max_steps must be >= 1', field='max_steps')

    def in_wall(self, point):
        return any(wall.contains_interior(point) for wall in self.walls)

    def __eq__(self, other):
        return isinstance(other, SmoothWorld) and self.data == other.data

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    @property
    def data(self):
        return {
            'walls': [list(wall.bounds) for wall in self.walls],
            'goals': [{'region': list(region.bounds), 'reward': reward} for region, reward in self.goals],
            'deaths': [{'region': list(region.bounds), 'penalty': penalty} for region, penalty in self.deaths],
            'start': self.start.tolist(),
            'dt': self.dt,
            'v_max': self.v_max,
            'max_steps': self.max_steps,
        }

    @data.setter
    def data(self, data):
        world = _world_from_document(data)
        self.walls, self.goals, self.deaths = world.walls, world.goals, world.deaths
        self.start, self.dt, self.v_max, self.max_steps = world.start, world.dt, world.v_max, world.max_steps


def world_step(world, state, action, t=0):
    """Advance the agent by one time step.

    Parameters
    ----------
    world : :class:`SmoothWorld`
    state : sequence of :obj:`float`
        Current position, outside every wall.
    action : sequence of :obj:`float`
        Velocity; clamped elementwise to ``[-v_max, v_max]``.
    t : :obj:`int`, optional
        Index of this step in the episode; the step with index
        ``max_steps - 1`` times out.

    Returns
    -------
    :class:`Transition`
    """
    state = np.asarray(state, dtype=float)
    action = np.clip(np.asarray(action, dtype=float), -world.v_max, world.v_max)
    delta = action * world.dt

    fraction, contact = 1.0, None
    for i in range(2):
        target = state[i] + delta[i]
        if target > 1.0 or target < -1.0:
            bound = 1.0 if target > 1.0 else -1.0
            s = (bound - state[i]) / delta[i]
            if s < fraction:
                fraction, contact = s, (i, bound)
    for wall in world.walls:
        hit = wall.segment_entry(state, delta)
        if hit is not None and hit[0] < fraction:
            axis = hit[1]
            fraction, contact = hit[0], (axis, wall.low[axis] if delta[axis] > 0 else wall.high[axis])

    next_state = state + max(fraction, 0.0) * delta
    if contact is not None:
        next_state[contact[0]] = contact[1]
    next_state = np.clip(next_state, -1.0, 1.0)
    if world.in_wall(next_state):
        # rounding at shared wall corners
        next_state = state.copy()

    for index, (region, reward) in enumerate(world.goals):
        if region.contains(next_state):
            return Transition(state, action, reward, next_state, True, 'goal', index)
    for index, (region, penalty) in enumerate(world.deaths):
        if region.contains(next_state):
            return Transition(state, action, -penalty, next_state, True, 'death', index)
    if t + 1 >= world.max_steps:
        return Transition(state, action, 0.0, next_state, True, 'timeout', -1)
    return Transition(state, action, 0.0, next_state, False, 'none', -1)


# ------------------------------------------------------------------------------
# layout documents
# ------------------------------------------------------------------------------

_FIELDS = ('name', 'walls', 'goals', 'deaths', 'start', 'dt', 'v_max', 'max_steps')


def _bounds(value, field, source):
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise LayoutError('expected [xmin, ymin, xmax, ymax]', field=field, source=source)
    try:
        return Region(*[float(v) for v in value])
    except (TypeError, ValueError) as error:
        raise LayoutError(str(error), field=field, source=source)


def _number(document, key, default, source, kind=float):
    value = document.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise LayoutError('expected a number, got {!r}'.format(value), field=key, source=source)
    if kind is int and int(value) != value:
        raise LayoutError('expected an integer, got {!r}'.format(value), field=key, source=source)
    return kind(value)


def _zones(document, key, amount, source):
    zones = []
    entries = document.get(key, [])
    if not isinstance(entries, list):
        raise LayoutError('expected a list', field=key, source=source)
    for i, entry in enumerate(entries):
        field = '{}[{}]'.format(key, i)
        if not isinstance(entry, dict) or 'region' not in entry:
            raise LayoutError("expected an object with a 'region'", field=field, source=source)
        region = _bounds(entry['region'], field + '.region', source)
        value = entry.get(amount, 1.0)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
            raise LayoutError('expected a non-negative number', field='{}.{}'.format(field, amount), source=source)
        zones.append((region, float(value)))
    return zones


def _world_from_document(document, source=None):
    if not isinstance(document, dict):
        raise LayoutError('a layout must be a JSON object', source=source)
    unknown = sorted(set(document) - set(_FIELDS))
    if unknown:
        raise LayoutError('unknown field', field=unknown[0], source=source)

    walls = document.get('walls', [])
    if not isinstance(walls, list):
        raise LayoutError('expected a list', field='walls', source=source)
    walls = [_bounds(wall, 'walls[{}]'.format(i), source) for i, wall in enumerate(walls)]
    goals = _zones(document, 'goals', 'reward', source)
    deaths = _zones(document, 'deaths', 'penalty', source)

    start = document.get('start', [0.0, 0.0])
    if not isinstance(start, list) or len(start) != 2:
        raise LayoutError('expected [x, y]', field='start', source=source)

    try:
        return SmoothWorld(walls, goals, deaths, start,
                           dt=_number(document, 'dt', 0.1, source),
                           v_max=_number(document, 'v_max', 1.0, source),
                           max_steps=_number(document, 'max_steps', 64, source, kind=int),
                           name=document.get('name'))
    except LayoutError as error:
        if source is None:
            raise
        raise LayoutError(error.reason, field=error.field, line=error.line, source=source)


def load_layout(text, source=None):
    """Parse and validate a layout document.

    Layouts are JSON objects with the fields ``walls`` (list of
    ``[xmin, ymin, xmax, ymax]``), ``goals`` and ``deaths`` (lists of
    ``{"region": [...], "reward"|"penalty": value}``), ``start``, ``dt``,
    ``v_max``, ``max_steps`` and an optional ``name``.

    Parameters
    ----------
    text : :obj:`str`
    source : :obj:`str`, optional
        File name used in error messages.

    Returns
    -------
    :class:`SmoothWorld`

    Raises
    ------
    :class:`compas_mepoly.exceptions.LayoutError`
        With the line of a syntax error or the path of an invalid field.

    Examples
    --------
    >>> world = load_layout('{"goals": [{"region": [0.5, 0.5, 1, 1]}], "start": [0, 0]}')
    >>> len(world.goals), world.max_steps
    (1, 64)
    """
    try:
        document = json_loads(text)
    except json.JSONDecodeError as error:
        raise LayoutError('{} (column {})'.format(error.msg, error.colno), line=error.lineno, source=source)
    return _world_from_document(document, source)


def read_layout(path):
    """Read a layout file; see :func:`load_layout`."""
    with open(path, 'r') as f:
        return load_layout(f.read(), source=path)


def dump_layout(world):
    """Serialize a world to layout text accepted by :func:`load_layout`."""
    document = world.data
    if world.name and world.name != world.__class__.__name__:
        document['name'] = world.name
    return json_dumps(document, pretty=True)


def write_trajectory_csv(filepath, rows):
    """Write trajectory rows in :data:`TRAJECTORY_HEADER` order."""
    write_csv(filepath, TRAJECTORY_HEADER, rows)
