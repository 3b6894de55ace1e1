import numpy as np
import pytest
from scipy.special import softmax

from compas_mepoly.environments import BanditEnv
from compas_mepoly.environments import make_manifold
from compas_mepoly.environments import mode_mass
from compas_mepoly.networks import AdamState
from compas_mepoly.networks import natural_gradient_step
from compas_mepoly.polynomials import NaturalParams
from compas_mepoly.polynomials import PolyDistribution
from compas_mepoly.training import KL_TRACE_HEADER
from compas_mepoly.training import BanditConfig
from compas_mepoly.training import BanditTrainer
from compas_mepoly.training import bandit_gradient
from compas_mepoly.training import bandit_maxent_update
from compas_mepoly.training import score_function_gradient


@pytest.fixture(scope='module')
def three_points():
    return PolyDistribution.from_settings(dim=1, order=2, grid_size=3)


@pytest.fixture(scope='module')
def plane():
    return PolyDistribution.from_settings(dim=2, order=2, grid_size=16)


def test_config_validation():
    config = BanditConfig()
    assert (config.alpha, config.batch_size, config.baseline, config.optimizer) == (0.05, 1024, 'leave_one_out', 'natural')
    assert BanditConfig.from_data({'optimizer': 'adam'}).damping == config.damping
    assert BanditConfig.from_data({'steps': 10}).steps == 10
    with pytest.raises(ValueError):
        BanditConfig(alpha=-1.0)
    with pytest.raises(ValueError):
        BanditConfig(batch_size=1)
    with pytest.raises(ValueError):
        BanditConfig(baseline='median')
    with pytest.raises(ValueError):
        BanditConfig(optimizer='rmsprop')
    with pytest.raises(ValueError):
        BanditConfig(damping=0.0)
    with pytest.raises(ValueError):
        BanditConfig(max_kl=-0.1)


@pytest.mark.parametrize('baseline', ['leave_one_out', 'batch_mean'])
def test_constant_rewards_leave_pure_entropy_ascent(plane, baseline):
    rng = np.random.default_rng(0)
    params = plane.params([0.0, 0.4, -0.3, 0.2, 0.5, -0.6])
    actions, _ = plane.sample(params, rng, size=32)
    rewards = np.full(32, 0.7)
    assert np.allclose(score_function_gradient(rewards, plane.log_prob_gradient(params, actions), baseline), 0.0)

    updated = bandit_maxent_update(params, actions, rewards, 0.1, plane, lr=0.5, baseline=baseline)
    step = 0.5 * 0.1 * plane.entropy_gradient(params)
    step[0] = 0.0
    assert np.allclose(updated.values, params.values + step)
    assert plane.entropy(updated) > plane.entropy(params)


def test_update_with_adam_and_clipping(plane):
    params = plane.params([0.0, 0.0, 0.0, 4.99, 0.0, 0.0])
    actions = np.array([[0.9, 0.0], [-0.9, 0.0]])
    rewards = np.array([1.0, 0.0])
    state = AdamState(plane.feature_count)
    updated = bandit_maxent_update(params, actions, rewards, 0.0, plane, lr=0.1, optimizer_state=state)
    assert state.t == 1
    assert updated.values[3] == 5.0
    assert updated.values[0] == 0.0


def test_score_function_estimator_is_unbiased(three_points):
    distribution = three_points
    params = distribution.params([0.0, 0.3, -0.4])
    rewards_at = np.array([0.2, 1.0, -0.5])
    masses = distribution.masses(params)
    scores_at = distribution.features - distribution.expected_features(params)
    exact = (masses * rewards_at).dot(scores_at)

    rng = np.random.default_rng(123)
    batches, size = 100000, 4
    indices = rng.choice(3, size=(batches, size), p=masses)
    estimates = score_function_gradient(rewards_at[indices], scores_at[indices])
    mean = estimates.mean(axis=0)
    error = estimates.std(axis=0) / np.sqrt(batches)
    assert np.all(np.abs(mean - exact)[1:] <= 3.5 * error[1:])


def test_bandit_gradient_adds_exact_entropy_term(plane):
    rng = np.random.default_rng(1)
    params = plane.params([0.0, 0.4, -0.3, 0.2, 0.5, -0.6])
    actions, _ = plane.sample(params, rng, size=16)
    rewards = rng.uniform(size=16)
    plain = bandit_gradient(params, actions, rewards, 0.0, plane)
    regularized = bandit_gradient(params, actions, rewards, 0.3, plane)
    assert np.allclose(regularized - plain, 0.3 * plane.entropy_gradient(params))


def test_greedy_training_concentrates(plane):
    env = BanditEnv([[0.5, 0.5]], sigma=0.2)
    trainer = BanditTrainer(env, plane, BanditConfig(alpha=0.0, lr=0.05, batch_size=128, steps=60, optimizer='adam'), seed=0)
    start = plane.entropy(trainer.params)
    rows = trainer.train()
    assert len(rows) == 60
    assert all(len(row) == len(KL_TRACE_HEADER) for row in rows)
    assert rows[-1][2] < start - 0.5
    assert rows[-1][3] > rows[0][3]
    assert np.linalg.norm(plane.expected_action(trainer.params) - [0.5, 0.5]) < np.linalg.norm([0.5, 0.5])


def test_training_is_deterministic(plane):
    env = BanditEnv.from_manifold('two_moons', n=200, seed=0)
    config = BanditConfig(steps=5, batch_size=32)
    first = BanditTrainer(env, plane, config, seed=9).train()
    second = BanditTrainer(env, plane, config, seed=9).train()
    assert first == second


def test_kl_of_uniform_start(plane):
    env = BanditEnv([[0.0, 0.0]], sigma=0.3, alpha=1e6)
    trainer = BanditTrainer(env, plane, seed=0)
    assert trainer.config.alpha == 1e6
    assert trainer.kl_to_target() == pytest.approx(0.0, abs=1e-6)
    assert isinstance(trainer.params, NaturalParams)


def test_exact_natural_steps_reach_boltzmann_target(three_points):
    distribution = three_points
    rewards_at = np.array([0.2, 1.0, -0.5])
    alpha = 0.5
    lam = np.zeros(3)
    for _ in range(100):
        masses = distribution.masses(lam)
        scores = distribution.features - distribution.expected_features(lam)
        gradient = (masses * rewards_at).dot(scores) + alpha * distribution.entropy_gradient(lam)
        lam = natural_gradient_step(lam, gradient, distribution.fisher_information(lam), lr=0.5, damping=1e-10, max_kl=0.0)
    target = softmax(rewards_at / alpha + distribution.grid.log_weights)
    assert np.allclose(distribution.masses(lam), target, atol=1e-8)


def test_natural_update_stays_in_trust_region(plane):
    rng = np.random.default_rng(4)
    params = plane.params([0.0, 0.4, -0.3, 0.2, 0.5, -0.6])
    actions, _ = plane.sample(params, rng, size=64)
    rewards = rng.uniform(size=64)
    updated = bandit_maxent_update(params, actions, rewards, 0.1, plane, lr=50.0, natural=True, max_kl=1e-3)
    delta = updated.values - params.values
    assert updated.values[0] == 0.0
    assert 0.5 * delta.dot(plane.fisher_information(params)).dot(delta) <= 1e-3 + 1e-12
    assert plane.kl_divergence(params, updated) < 2e-3


@pytest.mark.slow
def test_two_moons_keeps_both_modes():
    # the shipped family: 12 x 12 grid with order 22 reaches every grid function
    distribution = PolyDistribution.from_settings(dim=2, order=22, grid_size=12, clip=1000.0)
    env = BanditEnv.from_manifold('two_moons', seed=0)
    trainer = BanditTrainer(env, distribution, BanditConfig(alpha=0.05), seed=0)
    trainer.train()

    points, labels = make_manifold('two_moons', rng=0, return_labels=True)
    trained = mode_mass(distribution.masses(trainer.params), distribution.grid.points, points, labels, 3 * env.sigma)
    assert np.all(trained >= 0.25)
    assert trainer.kl_to_target() < 0.25
