from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np

from compas_mepoly.environments import world_step

__all__ = [
    'RolloutBuffer',
    'collect_rollouts',
    'compute_gae',
]


class RolloutBuffer(object):
    """On-policy records of one collection phase.

    Records of every environment copy are stored contiguously, copy after
    copy. A segment ends either with a terminal transition (``dones``) or
    with the last record of its copy (``ends``); unfinished segments are
    bootstrapped with ``bootstrap_values``.

    Attributes
    ----------
    states, actions, env_actions : :class:`numpy.ndarray`
        ``(T, 2)`` positions, grid-point actions and the velocities applied.
    indices : :class:`numpy.ndarray`
        Grid index of every action.
    log_probs, rewards, values : :class:`numpy.ndarray`
        ``(T,)`` behavior log-probabilities, rewards and value estimates.
    dones, ends : :class:`numpy.ndarray`
        ``(T,)`` boolean flags.
    bootstrap_values : :class:`numpy.ndarray`
        Value of the next state where a segment ends without a terminal.
    episodes : :class:`numpy.ndarray`
        Episode id of every record.
    causes : :obj:`list` of :obj:`str`
        Terminal cause of every record (``'none'`` for non-terminal steps).
    advantages, returns : :class:`numpy.ndarray` or ``None``
        Filled by :func:`compute_gae`.
    """

    def __init__(self, states=None, actions=None, log_probs=None, rewards=None, values=None, dones=None,
                 indices=None, env_actions=None, ends=None, bootstrap_values=None, episodes=None, causes=None):
        self.rewards = np.asarray(rewards if rewards is not None else [], dtype=float)
        size = self.rewards.shape[0]
        self.states = np.asarray(states if states is not None else np.zeros((size, 2)), dtype=float)
        self.actions = np.asarray(actions if actions is not None else np.zeros((size, 2)), dtype=float)
        self.env_actions = np.asarray(env_actions, dtype=float) if env_actions is not None else self.actions.copy()
        self.indices = np.asarray(indices if indices is not None else np.zeros(size), dtype=int)
        self.log_probs = np.asarray(log_probs if log_probs is not None else np.zeros(size), dtype=float)
        self.values = np.asarray(values if values is not None else np.zeros(size), dtype=float)
        self.dones = np.asarray(dones if dones is not None else np.zeros(size), dtype=bool)
        if ends is None:
            ends = np.zeros(size, dtype=bool)
            if size:
                ends[-1] = True
        self.ends = np.asarray(ends, dtype=bool)
        self.bootstrap_values = np.asarray(bootstrap_values if bootstrap_values is not None else np.zeros(size), dtype=float)
        self.episodes = np.asarray(episodes if episodes is not None else np.zeros(size), dtype=int)
        self.causes = list(causes) if causes is not None else ['none'] * size
        self.advantages = None
        self.returns = None

        for name in ('states', 'actions', 'env_actions', 'indices', 'log_probs', 'values', 'dones', 'ends', 'bootstrap_values', 'episodes'):
            if getattr(self, name).shape[0] != size:
                raise ValueError('Rollout field {} has {} records, expected {}.'.format(name, getattr(self, name).shape[0], size))
        if not np.all(np.isfinite(self.log_probs)):
            raise ValueError('Behavior log-probabilities must be finite.')

    def __len__(self):
        return self.rewards.shape[0]

    def episode_returns(self):
        """Undiscounted return of every episode that terminated inside the buffer."""
        totals = []
        total = 0.0
        for reward, done, end in zip(self.rewards, self.dones, self.ends):
            total += reward
            if done:
                totals.append(total)
            if done or end:
                total = 0.0
        return np.array(totals)

    def terminal_causes(self):
        return [cause for cause, done in zip(self.causes, self.dones) if done]


def compute_gae(buffer, gamma=0.99, gae_lambda=0.95):
    """Generalized advantage estimation over the buffer's segments.

    ``delta_t = r_t + gamma V(s_{t+1}) - V(s_t)`` with ``V(s_{t+1}) = 0``
    after a terminal step; ``A_t = delta_t + gamma lambda A_{t+1}`` within a
    segment. Returns are advantages plus values. The buffer is updated in
    place and returned.

    Parameters
    ----------
    buffer : :class:`RolloutBuffer`
    gamma : :obj:`float`, optional
    gae_lambda : :obj:`float`, optional

    Returns
    -------
    :class:`RolloutBuffer`
    """
    size = len(buffer)
    advantages = np.zeros(size)
    carry = 0.0
    for t in reversed(range(size)):
        if buffer.dones[t]:
            next_value, carry = 0.0, 0.0
        elif buffer.ends[t]:
            next_value, carry = buffer.bootstrap_values[t], 0.0
        else:
            next_value = buffer.values[t + 1]
        delta = buffer.rewards[t] + gamma * next_value - buffer.values[t]
        carry = delta + gamma * gae_lambda * carry
        advantages[t] = carry
    buffer.advantages = advantages
    buffer.returns = advantages + buffer.values
    return buffer


def collect_rollouts(world, policy, n_steps, rng, envs=1, jitter=False):
    """Run the policy in ``envs`` copies of a world for ``n_steps`` steps each.

    Copies step in lockstep so the policy is evaluated on the batch of their
    states. Every copy starts a fresh episode at the layout's start and
    restarts after each terminal transition.

    Parameters
    ----------
    world : :class:`compas_mepoly.environments.SmoothWorld`
    policy : :class:`compas_mepoly.training.PolyPolicy`
    n_steps : :obj:`int`
        Steps per copy.
    rng : :class:`numpy.random.Generator`
    envs : :obj:`int`, optional
    jitter : :obj:`bool`, optional
        Apply velocities jittered within the grid cell of the sampled action.

    Returns
    -------
    :class:`RolloutBuffer`

    Raises
    ------
    :class:`compas_mepoly.exceptions.NumericalError`
        If the policy produces non-finite natural parameters.
    """
    positions = np.tile(world.start, (envs, 1))
    clocks = np.zeros(envs, dtype=int)
    episode_ids = np.arange(envs)
    next_episode = envs

    shape = (envs, n_steps)
    states = np.zeros(shape + (2,))
    actions = np.zeros(shape + (2,))
    env_actions = np.zeros(shape + (2,))
    indices = np.zeros(shape, dtype=int)
    log_probs = np.zeros(shape)
    rewards = np.zeros(shape)
    values = np.zeros(shape)
    dones = np.zeros(shape, dtype=bool)
    episodes = np.zeros(shape, dtype=int)
    causes = [['none'] * n_steps for _ in range(envs)]
    points = policy.distribution.grid.points

    for step in range(n_steps):
        applied, step_log_probs, step_indices = policy.act(positions, rng, jitter=jitter)
        step_values = policy.value(positions)
        for e in range(envs):
            transition = world_step(world, positions[e], applied[e], clocks[e])
            states[e, step] = positions[e]
            actions[e, step] = points[step_indices[e]]
            env_actions[e, step] = transition.action
            indices[e, step] = step_indices[e]
            log_probs[e, step] = step_log_probs[e]
            rewards[e, step] = transition.reward
            values[e, step] = step_values[e]
            dones[e, step] = transition.done
            episodes[e, step] = episode_ids[e]
            causes[e][step] = transition.cause
            if transition.done:
                positions[e] = world.start
                clocks[e] = 0
                episode_ids[e] = next_episode
                next_episode += 1
            else:
                positions[e] = transition.next_state
                clocks[e] += 1

    ends = np.zeros(shape, dtype=bool)
    ends[:, -1] = True
    bootstrap = np.zeros(shape)
    bootstrap[:, -1] = np.where(dones[:, -1], 0.0, policy.value(positions))

    def flat(array):
        return array.reshape((envs * n_steps,) + array.shape[2:])

    return RolloutBuffer(states=flat(states), actions=flat(actions), log_probs=flat(log_probs),
                         rewards=flat(rewards), values=flat(values), dones=flat(dones),
                         indices=flat(indices), env_actions=flat(env_actions), ends=flat(ends),
                         bootstrap_values=flat(bootstrap), episodes=flat(episodes),
                         causes=[cause for row in causes for cause in row])
