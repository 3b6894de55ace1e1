import math

import numpy as np
import pytest
from compas.geometry import allclose
from scipy import stats

from compas_mepoly.exceptions import DimensionMismatchError
from compas_mepoly.exceptions import NumericalError
from compas_mepoly.polynomials import ExponentSet
from compas_mepoly.polynomials import NaturalParams
from compas_mepoly.polynomials import PolyDistribution
from compas_mepoly.polynomials import build_grid
from compas_mepoly.polynomials import clip_params
from compas_mepoly.polynomials import features
from compas_mepoly.polynomials import l1_distance
from compas_mepoly.polynomials import legendre_table


@pytest.fixture(scope='module')
def quadratic_1d():
    return PolyDistribution.from_settings(dim=1, order=2, grid_size=64)


@pytest.fixture(scope='module')
def fine_1d():
    return PolyDistribution.from_settings(dim=1, order=2, grid_size=1024)


@pytest.fixture(scope='module')
def plane():
    return PolyDistribution.from_settings(dim=2, order=4, grid_size=64)


def dense_oracle(energy, n=1000001):
    x = np.linspace(-1.0, 1.0, n)
    w = np.full(n, 2.0 / (n - 1))
    w[0] = w[-1] = 0.5 * w[1]
    return x, w, energy(x)


def random_params(distribution, rng, scale=1.0):
    values = rng.uniform(-scale, scale, distribution.feature_count)
    values[0] = 0.0
    return distribution.params(values)


def test_clip_params():
    assert clip_params([7.0, -9.0, 0.0]).values.tolist() == [5.0, -5.0, 0.0]
    assert clip_params(np.zeros(4)).values.tolist() == [0.0] * 4
    inside = [0.5, -4.9, 3.0]
    assert clip_params(clip_params(inside).values).values.tolist() == inside


def test_clip_params_rejects_bad_input():
    with pytest.raises(DimensionMismatchError):
        clip_params([1.0, 2.0], feature_count=3)
    with pytest.raises(NumericalError):
        clip_params([1.0, float('nan')])
    with pytest.raises(ValueError):
        NaturalParams([0.0], clip=0.0)


def test_natural_params_are_read_only():
    params = NaturalParams.zeros(3)
    with pytest.raises(ValueError):
        params.values[0] = 1.0


@pytest.mark.parametrize('dim', [1, 2, 3])
def test_uniform_case_is_exact(dim):
    distribution = PolyDistribution.from_settings(dim=dim, order=2, grid_size=16 if dim == 3 else 64)
    uniform = NaturalParams.zeros(distribution.feature_count)
    action = np.full(dim, 0.3)
    assert distribution.log_partition(uniform) == pytest.approx(dim * math.log(2), abs=1e-12)
    assert distribution.entropy(uniform) == pytest.approx(dim * math.log(2), abs=1e-12)
    assert distribution.log_prob(uniform, action) == pytest.approx(-dim * math.log(2), abs=1e-12)
    assert np.allclose(distribution.expected_action(uniform), np.zeros(dim), atol=1e-12)


def test_log_partition_matches_dense_oracle(fine_1d):
    params = fine_1d.params([0.0, 0.0, 2.0])
    x, w, energy = dense_oracle(lambda x: 2.0 * legendre_table(x, 2)[:, 2])
    expected = math.log(np.exp(energy).dot(w))
    assert fine_1d.log_partition(params) == pytest.approx(expected, abs=1e-4)


def test_entropy_matches_dense_oracle(fine_1d):
    params = fine_1d.params([0.0, 0.0, 2.0])
    x, w, energy = dense_oracle(lambda x: 2.0 * legendre_table(x, 2)[:, 2])
    log_density = energy - math.log(np.exp(energy).dot(w))
    expected = -np.sum(np.exp(log_density) * log_density * w)
    assert fine_1d.entropy(params) == pytest.approx(expected, abs=1e-3)


def test_peaked_entropy_below_uniform(quadratic_1d):
    params = quadratic_1d.params([0.0, 0.0, -5.0])
    assert quadratic_1d.entropy(params) < math.log(2)


def test_log_prob_differences(plane):
    params = random_params(plane, np.random.default_rng(3))
    a, b = np.array([0.2, -0.4]), np.array([-0.7, 0.9])
    difference = plane.log_prob(params, a) - plane.log_prob(params, b)
    expected = params.values.dot(features(a, plane.basis) - features(b, plane.basis))
    assert difference == pytest.approx(expected, abs=1e-12)


def test_masses_normalized(plane):
    rng = np.random.default_rng(5)
    for _ in range(5):
        params = random_params(plane, rng, scale=5.0)
        assert plane.masses(params).sum() == pytest.approx(1.0, abs=1e-10)


def test_log_partition_gradient_matches_finite_differences(plane):
    rng = np.random.default_rng(11)
    step = 1e-4
    for _ in range(10):
        lam = random_params(plane, rng, scale=1.0).values
        gradient = plane.expected_features(lam)
        numeric = np.zeros_like(lam)
        for j in range(lam.shape[0]):
            shift = np.zeros_like(lam)
            shift[j] = step
            numeric[j] = (plane.log_partition(lam + shift) - plane.log_partition(lam - shift)) / (2 * step)
        assert np.allclose(gradient, numeric, rtol=1e-5, atol=1e-8)


def test_entropy_gradient_matches_finite_differences(plane):
    rng = np.random.default_rng(12)
    step = 1e-5
    lam = random_params(plane, rng, scale=1.0).values
    gradient = plane.entropy_gradient(lam)
    numeric = np.zeros_like(lam)
    for j in range(lam.shape[0]):
        shift = np.zeros_like(lam)
        shift[j] = step
        numeric[j] = (plane.entropy(lam + shift) - plane.entropy(lam - shift)) / (2 * step)
    assert np.allclose(gradient, numeric, rtol=1e-4, atol=1e-7)


def test_fisher_information_matches_finite_differences(plane):
    rng = np.random.default_rng(13)
    step = 1e-5
    lam = random_params(plane, rng, scale=1.0).values
    fisher = plane.fisher_information(lam)
    numeric = np.zeros_like(fisher)
    for j in range(lam.shape[0]):
        shift = np.zeros_like(lam)
        shift[j] = step
        numeric[:, j] = (plane.expected_features(lam + shift) - plane.expected_features(lam - shift)) / (2 * step)
    assert np.allclose(fisher, numeric, rtol=1e-4, atol=1e-7)
    assert np.allclose(fisher[0], 0.0, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(fisher[1:, 1:])) > 0.0


def test_expected_features_constant_entry(plane):
    params = random_params(plane, np.random.default_rng(2))
    assert plane.expected_features(params)[0] == pytest.approx(1.0, abs=1e-12)


def test_uniform_odd_moments_vanish(plane):
    moments = plane.expected_features(NaturalParams.zeros(plane.feature_count))
    odd = plane.basis.degrees % 2 == 1
    assert np.allclose(moments[odd], 0.0, atol=1e-12)


def test_expected_action_tilt():
    distribution = PolyDistribution.from_settings(dim=1, order=1, grid_size=256)
    mean = distribution.expected_action(distribution.params([0.0, 1.0]))
    assert mean[0] == pytest.approx(1.0 / math.tanh(1.0) - 1.0, abs=1e-3)

    tilted = PolyDistribution.from_settings(dim=2, order=1, grid_size=32)
    params = np.zeros(tilted.feature_count)
    params[tilted.basis.index((1, 0))] = 1.5
    assert tilted.expected_action(params)[0] > 0


def test_shift_invariance(plane):
    rng = np.random.default_rng(21)
    lam = random_params(plane, rng).values
    shifted = lam.copy()
    shifted[0] += 1.7
    action = np.array([0.1, 0.5])
    assert plane.log_prob(lam, action) == pytest.approx(plane.log_prob(shifted, action), abs=1e-12)
    assert plane.entropy(lam) == pytest.approx(plane.entropy(shifted), abs=1e-12)
    assert allclose(plane.expected_action(lam), plane.expected_action(shifted), tol=1e-12)
    a, _ = plane.sample(lam, np.random.default_rng(0), size=50)
    b, _ = plane.sample(shifted, np.random.default_rng(0), size=50)
    assert np.array_equal(a, b)


def test_kl_divergence(quadratic_1d):
    p = quadratic_1d.params([0.0, 0.0, 0.0])
    q = quadratic_1d.params([0.0, 0.0, 3.0])
    assert quadratic_1d.kl_divergence(p, p) == 0.0
    assert quadratic_1d.kl_divergence(p, q) > 0


def test_kl_divergence_matches_dense_oracle(fine_1d):
    p = fine_1d.params([0.0, 0.0, 1.0])
    q = fine_1d.params([0.0, 0.0, -1.0])
    x, w, p2 = dense_oracle(lambda x: legendre_table(x, 2)[:, 2])
    log_p = p2 - math.log(np.exp(p2).dot(w))
    log_q = -p2 - math.log(np.exp(-p2).dot(w))
    expected = np.sum(np.exp(log_p) * (log_p - log_q) * w)
    assert fine_1d.kl_divergence(p, q) == pytest.approx(expected, abs=1e-4)


def test_l1_distance():
    a = np.array([0.25, 0.25, 0.5])
    assert l1_distance(a, a) == 0.0
    assert l1_distance([1.0, 0.0], [0.0, 1.0]) == 2.0
    with pytest.raises(DimensionMismatchError):
        l1_distance([1.0], [0.5, 0.5])


def test_l1_distance_uniform_against_tilt(quadratic_1d):
    uniform = quadratic_1d.masses(np.zeros(3))
    tilted = quadratic_1d.masses([0.0, 0.0, 2.0])
    distance = l1_distance(uniform, tilted)
    assert 0.0 < distance < 2.0


def test_uniform_sampler_mean():
    distribution = PolyDistribution.from_settings(dim=1, order=2, grid_size=64)
    actions, _ = distribution.sample(np.zeros(3), np.random.default_rng(0), size=100000)
    error = actions[:, 0].std() / math.sqrt(actions.shape[0])
    assert abs(actions[:, 0].mean()) < 3 * error


def test_sampler_replay(plane):
    params = random_params(plane, np.random.default_rng(1))
    a, log_a = plane.sample(params, np.random.default_rng(9), size=20)
    b, log_b = plane.sample(params, np.random.default_rng(9), size=20)
    assert np.array_equal(a, b)
    assert np.array_equal(log_a, log_b)


def test_sampled_log_probs_match_log_prob(plane):
    params = random_params(plane, np.random.default_rng(4))
    actions, log_probs = plane.sample(params, np.random.default_rng(0), size=200)
    assert np.allclose(log_probs, plane.log_prob(params, actions), atol=1e-10)


def test_sampler_feature_means(plane):
    rng = np.random.default_rng(31)
    for _ in range(3):
        params = random_params(plane, rng)
        actions, _ = plane.sample(params, rng, size=100000)
        feats = features(actions, plane.basis)
        errors = feats.std(axis=0) / math.sqrt(actions.shape[0])
        deviation = np.abs(feats.mean(axis=0) - plane.expected_features(params))
        assert np.all(deviation[1:] <= 4 * errors[1:] + 1e-12)


def test_sampler_chi_square(quadratic_1d):
    rng = np.random.default_rng(7)
    for _ in range(3):
        params = random_params(quadratic_1d, rng)
        indices = quadratic_1d.sample_indices(params, rng, size=100000)
        observed = np.bincount(indices, minlength=64)
        expected = quadratic_1d.masses(params) * 100000
        assert stats.chisquare(observed, expected).pvalue >= 0.001


def test_entropy_matches_sampled_log_probs(plane):
    params = random_params(plane, np.random.default_rng(8))
    _, log_probs = plane.sample(params, np.random.default_rng(8), size=100000)
    error = log_probs.std() / math.sqrt(log_probs.shape[0])
    assert abs(plane.entropy(params) + log_probs.mean()) < 3 * error


def test_cdf_search_and_clamp():
    distribution = PolyDistribution.from_settings(dim=1, order=1, grid_size=4)

    class Fixed(object):
        def __init__(self, values):
            self.values = np.asarray(values)

        def random(self, size=None):
            return self.values

    # uniform masses 1/6, 1/3, 1/3, 1/6
    draws = [0.0, 0.3, 0.6, 0.9, 1.0]
    assert distribution.sample_indices(np.zeros(2), Fixed(draws)).tolist() == [0, 1, 2, 3, 3]
    batched = distribution.sample_indices(np.zeros((5, 2)), Fixed(draws))
    assert batched.tolist() == [0, 1, 2, 3, 3]


def test_jittered_samples_stay_in_cell(plane):
    params = random_params(plane, np.random.default_rng(6))
    actions, log_probs, indices = plane.sample(params, np.random.default_rng(1), size=500, jitter=True, return_index=True)
    offsets = np.abs(actions - plane.grid.points[indices])
    assert np.all(offsets <= 0.5 * plane.grid.spacing + 1e-12)
    assert np.all(np.abs(actions) <= 1.0)
    assert np.allclose(log_probs, plane.grid_log_density(params)[indices])


def test_batched_parameters(plane):
    rng = np.random.default_rng(13)
    batch = np.stack([random_params(plane, rng).values for _ in range(4)])
    entropies = plane.entropy(batch)
    assert entropies.shape == (4,)
    for row, value in zip(batch, entropies):
        assert plane.entropy(row) == pytest.approx(value)
    actions = rng.uniform(-1, 1, size=(4, 2))
    log_probs = plane.log_prob(batch, actions)
    for row, action, value in zip(batch, actions, log_probs):
        assert plane.log_prob(row, action) == pytest.approx(value)
    gradients = plane.entropy_gradient(batch)
    assert np.allclose(gradients[1], plane.entropy_gradient(batch[1]))
    sampled, _, indices = plane.sample(batch, rng, return_index=True)
    assert sampled.shape == (4, 2) and indices.shape == (4,)


def test_batched_action_count_mismatch(plane):
    with pytest.raises(DimensionMismatchError):
        plane.log_prob(np.zeros((3, plane.feature_count)), np.zeros((2, 2)))


def test_out_of_box_actions_are_clamped(plane):
    params = random_params(plane, np.random.default_rng(0))
    assert plane.log_prob(params, [1.5, 0.0]) == pytest.approx(plane.log_prob(params, [1.0, 0.0]))


def test_rejects_non_finite_params(plane):
    values = np.zeros(plane.feature_count)
    values[1] = np.inf
    with pytest.raises(NumericalError):
        plane.entropy(values)


def test_mismatched_basis_and_grid():
    with pytest.raises(DimensionMismatchError):
        PolyDistribution(ExponentSet(2, 2), build_grid(1, 8))


def test_density_image():
    distribution = PolyDistribution.from_settings(dim=2, order=2, grid_size=8)
    assert np.array_equal(distribution.density_image(np.zeros(6)), np.ones((8, 8)))

    params = np.zeros(6)
    params[distribution.basis.index((0, 1))] = 2.0
    image = distribution.density_image(params)
    assert image.shape == (8, 8)
    assert np.all(image[0] == 1.0)
    assert np.all(image[-1] == 0.0)

    strip = PolyDistribution.from_settings(dim=1, order=1, grid_size=8).density_image([0.0, 1.0])
    assert strip.shape == (1, 8)
    assert strip[0, -1] == 1.0 and strip[0, 0] == 0.0


def test_density_image_needs_low_dimension():
    distribution = PolyDistribution.from_settings(dim=3, order=1, grid_size=4)
    with pytest.raises(ValueError):
        distribution.density_image(np.zeros(4))


def test_from_settings_records_settings():
    distribution = PolyDistribution.from_settings(dim=4, order=2, grid_size=8, stochastic_grid_size=64, seed=3)
    assert distribution.grid.kind == 'stochastic'
    assert distribution.settings['dim'] == 4
    assert distribution.settings['seed'] == 3
    again = PolyDistribution.from_settings(**distribution.settings)
    assert np.array_equal(again.grid.points, distribution.grid.points)
