from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np

from compas_mepoly.networks import HIDDEN_SIZES
from compas_mepoly.networks import MlpParams
from compas_mepoly.networks import forward
from compas_mepoly.polynomials import clip_lambda

__all__ = [
    'PolyPolicy',
]


class PolyPolicy(object):
    """A state-conditioned polynomial policy with a value head.

    The policy network maps a state to raw natural parameters, which are
    clipped elementwise before they define the action distribution. The
    value network maps a state to a scalar.

    Parameters
    ----------
    distribution : :class:`compas_mepoly.polynomials.PolyDistribution`
    policy_params : :class:`compas_mepoly.networks.MlpParams`
        Output size equals the feature count of the distribution.
    value_params : :class:`compas_mepoly.networks.MlpParams`
        Output size 1.
    """

    def __init__(self, distribution, policy_params, value_params):
        if policy_params.output_size != distribution.feature_count:
            raise ValueError('Policy network outputs {} values, the distribution has {} features.'.format(
                policy_params.output_size, distribution.feature_count))
        if value_params.output_size != 1:
            raise ValueError('The value network must have one output.')
        self.distribution = distribution
        self.policy_params = policy_params
        self.value_params = value_params

    @classmethod
    def create(cls, distribution, state_dim=2, hidden_sizes=HIDDEN_SIZES, seed=0):
        """Fresh networks; the zero output layer makes the initial policy uniform."""
        policy_params = MlpParams.initialize(state_dim, distribution.feature_count, hidden_sizes, seed=seed)
        value_params = MlpParams.initialize(state_dim, 1, hidden_sizes, seed=seed + 1)
        return cls(distribution, policy_params, value_params)

    @property
    def state_dim(self):
        return self.policy_params.input_size

    def raw_lambda(self, states):
        return forward(self.policy_params, states)

    def natural(self, states):
        """Clipped natural parameters for one state or a batch."""
        return clip_lambda(self.raw_lambda(states), self.distribution.clip)

    def value(self, states):
        return forward(self.value_params, states)[..., 0]

    def act(self, states, rng, jitter=False):
        """Sample actions for a batch of states, one per row.

        Returns
        -------
        :obj:`tuple`
            ``(actions, log_probs, indices)``; ``actions`` are grid points,
            jittered within their cell when requested.
        """
        states = np.atleast_2d(states)
        return self.distribution.sample(self.natural(states), rng, jitter=jitter, return_index=True)

    def entropy(self, states):
        return self.distribution.entropy(self.natural(np.atleast_2d(states)))
