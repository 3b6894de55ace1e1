from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from collections import Counter

import numpy as np
from scipy.cluster.hierarchy import fcluster
from scipy.cluster.hierarchy import linkage

from compas_mepoly.environments import world_step
from compas_mepoly.utilities import write_csv

__all__ = [
    'CLUSTER_DISTANCE',
    'HISTOGRAM_HEADER',
    'cluster_terminals',
    'evaluate',
    'terminal_histogram',
    'write_terminal_histogram',
]

#: Single-linkage distance below which terminal positions share a cluster.
CLUSTER_DISTANCE = 0.2

HISTOGRAM_HEADER = ['x_min', 'x_max', 'y_min', 'y_max', 'count']


def cluster_terminals(positions, distance=CLUSTER_DISTANCE):
    """Single-linkage cluster labels of terminal positions, numbered from 1.

    Examples
    --------
    >>> cluster_terminals([[0.0, 0.0], [0.05, 0.0], [0.9, 0.9]]).tolist()
    [1, 1, 2]
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    if positions.shape[0] == 0:
        return np.zeros(0, dtype=int)
    if positions.shape[0] == 1:
        return np.ones(1, dtype=int)
    return fcluster(linkage(positions, method='single'), t=distance, criterion='distance')


def terminal_histogram(positions, bins=8):
    """Counts of terminal positions on a ``bins x bins`` partition of the box.

    Returns
    -------
    :obj:`list`
        Rows in :data:`HISTOGRAM_HEADER` order, x-major.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    counts, x_edges, y_edges = np.histogram2d(positions[:, 0], positions[:, 1], bins=bins, range=[[-1, 1], [-1, 1]])
    rows = []
    for i in range(bins):
        for j in range(bins):
            rows.append([x_edges[i], x_edges[i + 1], y_edges[j], y_edges[j + 1], int(counts[i, j])])
    return rows


def write_terminal_histogram(filepath, positions, bins=8):
    write_csv(filepath, HISTOGRAM_HEADER, terminal_histogram(positions, bins))


def evaluate(policy, world, episodes=100, rng=None, jitter=False, record=False):
    """Roll the stochastic policy out for a number of full episodes.

    Parameters
    ----------
    policy : :class:`compas_mepoly.training.PolyPolicy`
    world : :class:`compas_mepoly.environments.SmoothWorld`
    episodes : :obj:`int`, optional
    rng : :class:`numpy.random.Generator` or :obj:`int`, optional
    jitter : :obj:`bool`, optional
    record : :obj:`bool`, optional
        Keep the trajectory rows of every step.

    Returns
    -------
    :obj:`dict`
        ``mean_return``, ``success_rate``, ``goal_counts`` (episodes ended in
        every goal), ``goals_reached`` (distinct goals), ``cause_counts``,
        ``terminal_positions``, ``clusters`` (count of terminal-position
        clusters), ``cluster_labels`` and ``trajectories`` (rows in the
        trajectory CSV layout, empty unless ``record``).
    """
    rng = np.random.default_rng(rng)
    returns = []
    causes = Counter({'goal': 0, 'death': 0, 'timeout': 0})
    goal_counts = [0] * len(world.goals)
    terminals = []
    trajectories = []

    for episode in range(episodes):
        state = np.array(world.start, dtype=float)
        total = 0.0
        for t in range(world.max_steps):
            action = policy.act(state, rng, jitter=jitter)[0][0]
            transition = world_step(world, state, action, t)
            total += transition.reward
            if record:
                trajectories.append([episode, t, state[0], state[1], transition.action[0], transition.action[1],
                                     transition.reward, transition.cause])
            state = transition.next_state
            if transition.done:
                break
        returns.append(total)
        causes[transition.cause] += 1
        if transition.cause == 'goal':
            goal_counts[transition.region] += 1
        terminals.append(state)

    terminals = np.array(terminals).reshape(-1, 2)
    labels = cluster_terminals(terminals)
    return {
        'mean_return': float(np.mean(returns)) if returns else float('nan'),
        'success_rate': causes['goal'] / float(episodes) if episodes else float('nan'),
        'goal_counts': goal_counts,
        'goals_reached': sum(1 for count in goal_counts if count > 0),
        'cause_counts': dict(causes),
        'terminal_positions': terminals,
        'clusters': int(labels.max()) if labels.size else 0,
        'cluster_labels': labels,
        'trajectories': trajectories,
    }
