import numpy as np
import pytest

from compas_mepoly.environments import LEMNISCATE_SCALE
from compas_mepoly.environments import MANIFOLD_KINDS
from compas_mepoly.environments import MOON_OFFSET
from compas_mepoly.environments import MOON_RADIUS
from compas_mepoly.environments import make_manifold
from compas_mepoly.environments import mode_mass


@pytest.mark.parametrize('n', [1, 7, 2000])
def test_lemniscate_points_lie_on_the_curve(n):
    points = make_manifold('lemniscate', n, rng=0)
    x, y = points[:, 0], points[:, 1]
    c2 = LEMNISCATE_SCALE ** 2
    assert points.shape == (n, 2)
    assert np.allclose(c2 * y ** 2, x ** 2 * (c2 - x ** 2), atol=1e-12)


def test_two_moons_split_evenly():
    points, labels = make_manifold('two_moons', 2000, rng=1, return_labels=True)
    assert np.sum(labels == 0) == np.sum(labels == 1) == 1000
    dx, dy = MOON_OFFSET
    upper = points[labels == 0] - np.array([dx, dy])
    lower = points[labels == 1] - np.array([-dx, -dy])
    assert np.allclose(np.hypot(upper[:, 0], upper[:, 1]), MOON_RADIUS)
    assert np.allclose(np.hypot(lower[:, 0], lower[:, 1]), MOON_RADIUS)
    assert np.all(upper[:, 1] >= -1e-12)
    assert np.all(lower[:, 1] <= 1e-12)


@pytest.mark.parametrize('kind', MANIFOLD_KINDS)
def test_manifolds_stay_in_the_box(kind):
    points = make_manifold(kind, rng=2)
    assert points.shape == (2000, 2)
    assert np.all(np.abs(points) <= 1.0)


def test_manifolds_are_reproducible():
    assert np.array_equal(make_manifold('two_moons', 50, rng=3), make_manifold('two_moons', 50, rng=3))


def test_invalid_manifold_requests():
    with pytest.raises(ValueError):
        make_manifold('spiral', 10)
    with pytest.raises(ValueError):
        make_manifold('lemniscate', 0)


def test_mode_mass():
    grid_points = np.array([[0.0, 0.0], [1.0, 1.0], [0.5, -0.5]])
    masses = np.array([0.25, 0.5, 0.25])
    manifold = np.array([[0.0, 0.05], [1.0, 0.95]])
    result = mode_mass(masses, grid_points, manifold, [0, 1], radius=0.1)
    assert result.tolist() == [0.25, 0.5]
